use std::sync::Arc;

use super::*;
use crate::logmodel::read_session_files;
use crate::tasks::builtin_suite;

fn env() -> Environment {
    Environment::new(Arc::new(builtin_suite()))
}

fn lines(outcome: &ActionOutcome) -> Vec<String> {
    outcome.emitted.iter().map(LogEntry::line).collect()
}

fn all_sites() -> Vec<(Site, Location)> {
    let mut sites: Vec<_> = individual::PAGES
        .iter()
        .map(|(path, test)| {
            let site = Site::Individual {
                path: path.to_string(),
                test: test.to_string(),
            };
            (site, Location::new(*path).with("test", *test))
        })
        .collect();
    for final_path in ["/thanks", "/cart"] {
        let site = Site::Shop {
            final_path: final_path.to_string(),
        };
        for path in ["/", "/search?query=macbook", "/item?id=mbp-m3"] {
            sites.push((site.clone(), Location::parse(path).unwrap()));
        }
    }
    sites
}

#[test]
fn create_session_examples() {
    let env = env();
    let info = env.create_session("ind/click/button").unwrap();
    assert_eq!(info.start_path, "/ind/click?test=button");
    assert_eq!(env.create_session("e2e/order").unwrap().start_path, "/");
    assert!(matches!(env.create_session("nope"), Err(EnvError::UnknownTask(_))));
    assert_ne!(
        info.session_id,
        env.create_session("ind/click/button").unwrap().session_id
    );
}

#[test]
fn every_start_page_renders() {
    let env = env();
    for task in builtin_suite().tasks() {
        let s = env.create_session(task.id()).unwrap();
        let page = env.current_page(&s.session_id).unwrap();
        assert_eq!(page.path, task.start_path(), "{}", task.id());
    }
}

#[test]
fn manifest_agrees_with_html() {
    for (site, loc) in all_sites() {
        let doc = site.render(&loc).unwrap();
        let mut ids: Vec<_> = doc.elements.iter().map(|e| e.element_id.as_str()).collect();
        for id in &ids {
            let attr = format!("data-eid=\"{id}\"");
            assert_eq!(doc.body_html.matches(&attr).count(), 1, "{} {id}", doc.path);
        }
        assert_eq!(doc.body_html.matches("data-eid=").count(), ids.len(), "{}", doc.path);
        let n = ids.len();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), n, "{}", doc.path);
        for e in &doc.elements {
            assert_ne!(
                e.kind.category(),
                crate::taxonomy::Category::Informational,
                "{}",
                e.element_id
            );
        }
        assert_eq!(site.render(&loc).unwrap(), doc, "render is deterministic");
    }
}

#[test]
fn search_flow_examples() {
    let env = env();
    let s = env.create_session("e2e/order").unwrap().session_id;
    let typed = env
        .apply_action(&s, &ActionCommand::type_text("search-input", "macbook"))
        .unwrap();
    assert_eq!(lines(&typed), ["type/text // Search=macbook"]);
    assert_eq!(typed.new_path, "/?q=macbook");
    let out = env.apply_action(&s, &ActionCommand::click("search-button")).unwrap();
    assert_eq!(out.new_path, "/search?query=macbook");
    assert_eq!(
        lines(&out),
        ["click/iconbutton // Search", "nav // /search?query=macbook"]
    );
    assert!(!out.done);

    let page = env.current_page(&s).unwrap();
    let links: Vec<_> = page.elements.iter().filter(|e| e.control == Control::Link).collect();
    assert_eq!(links.len(), 3);
    assert!(page.body_html.contains(r#"id="card-mbp-m3""#));

    // the card container is not clickable
    let err = env.apply_action(&s, &ActionCommand::click("card-mbp-m3")).unwrap_err();
    assert!(matches!(err, EnvError::UnknownElement(_)));
    assert_eq!(env.result(&s).unwrap().log.entries.len(), 3);

    let out = env.apply_action(&s, &ActionCommand::click("result-mbp-m3")).unwrap();
    assert_eq!(lines(&out), ["click/link // MacBook Pro M3", "nav // /item?id=mbp-m3"]);
}

#[test]
fn slider_is_drag_only() {
    let env = env();
    let s = env.create_session("ind/click/slider-louder").unwrap().session_id;
    let err = env
        .apply_action(&s, &ActionCommand::click("slider-volume"))
        .unwrap_err();
    assert!(matches!(err, EnvError::IncompatibleVerb { .. }));
    let out = env.apply_action(&s, &ActionCommand::drag("slider-volume", 80)).unwrap();
    assert_eq!(lines(&out), ["click/slider // volume=80"]);
    assert_eq!(env.current_page(&s).unwrap().element_state("slider-volume"), Some("80"));
    let bad = ActionCommand {
        verb: Verb::Drag,
        target: Some("slider-volume".into()),
        payload: Some("loud".into()),
    };
    assert!(matches!(env.apply_action(&s, &bad), Err(EnvError::InvalidPayload(_))));
}

#[test]
fn tooltip_needs_hover() {
    let env = env();
    let s = env.create_session("ind/find/tooltip").unwrap().session_id;
    assert!(!env.current_page(&s).unwrap().body_html.contains("50 GB"));
    assert!(matches!(
        env.apply_action(&s, &ActionCommand::click("tip-storage")),
        Err(EnvError::IncompatibleVerb { .. })
    ));
    let out = env.apply_action(&s, &ActionCommand::hover("tip-storage")).unwrap();
    assert!(out.emitted.is_empty());
    assert!(env
        .current_page(&s)
        .unwrap()
        .body_html
        .contains("Includes 50 GB of cloud storage"));
    // hovering anything else is a harmless no-op
    let out = env.apply_action(&s, &ActionCommand::hover("btn-answer")).unwrap();
    assert!(out.emitted.is_empty());
}

#[test]
fn incompatible_and_malformed_commands() {
    let env = env();
    let s = env.create_session("ind/click/button").unwrap().session_id;
    assert!(matches!(
        env.apply_action(&s, &ActionCommand::type_text("btn-submit", "x")),
        Err(EnvError::IncompatibleVerb { .. })
    ));
    let no_target = ActionCommand {
        verb: Verb::Click,
        target: None,
        payload: None,
    };
    assert!(matches!(
        env.apply_action(&s, &no_target),
        Err(EnvError::MalformedCommand(_))
    ));
    let with_payload = ActionCommand {
        verb: Verb::Click,
        target: Some("btn-submit".into()),
        payload: Some("x".into()),
    };
    assert!(matches!(
        env.apply_action(&s, &with_payload),
        Err(EnvError::MalformedCommand(_))
    ));
    assert!(matches!(
        env.apply_action("missing", &ActionCommand::stop()),
        Err(EnvError::UnknownSession(_))
    ));
    let out = env.apply_action(&s, &ActionCommand::submit("btn-submit")).unwrap();
    assert_eq!(lines(&out), ["click/button // Submit"]);
}

#[test]
fn select_rejects_unknown_option() {
    let env = env();
    let s = env.create_session("ind/select/select").unwrap().session_id;
    assert!(matches!(
        env.apply_action(&s, &ActionCommand::select("sel-country", "France")),
        Err(EnvError::InvalidPayload(_))
    ));
    let out = env
        .apply_action(&s, &ActionCommand::select("sel-country", "Canada"))
        .unwrap();
    assert_eq!(lines(&out), ["select/select // Country=Canada"]);
}

#[test]
fn navigate_verb_logs_and_guards_final_page() {
    let env = env();
    let s = env.create_session("e2e/order").unwrap().session_id;
    let out = env
        .apply_action(&s, &ActionCommand::navigate("/search?query=zzz"))
        .unwrap();
    assert_eq!(
        lines(&out),
        [
            "navigateurl/arbitrarypage // /search?query=zzz",
            "nav // /search?query=zzz"
        ]
    );
    assert!(env.current_page(&s).unwrap().body_html.contains("No results."));
    let cart = encode_cart(&CartState::with_defaults(find_item("mbp-m3").unwrap()));
    let thanks = format!("/thanks?cart={cart}&shipping=a%7Cb%7Cc%7Cd%7Ce");
    assert!(matches!(
        env.apply_action(&s, &ActionCommand::navigate(&thanks)),
        Err(EnvError::NotFound(_))
    ));
    assert!(matches!(
        env.apply_action(&s, &ActionCommand::navigate("/ind/click?test=button")),
        Err(EnvError::NotFound(_))
    ));
    assert!(matches!(
        env.apply_action(&s, &ActionCommand::navigate("/checkout?cart=%7B%7D")),
        Err(EnvError::MalformedCart)
    ));
}

fn order_script() -> Vec<ActionCommand> {
    vec![
        ActionCommand::type_text("search-input", "MacBook Pro M3"),
        ActionCommand::click("search-button"),
        ActionCommand::click("result-mbp-m3"),
        ActionCommand::click("add-to-cart"),
        ActionCommand::type_text("ship-name", "John Doe"),
        ActionCommand::type_text("ship-street", "123 Main Street"),
        ActionCommand::type_text("ship-city", "Cambridge"),
        ActionCommand::type_text("ship-state", "MA"),
        ActionCommand::type_text("ship-zip", "02138"),
        ActionCommand::click("place-order"),
    ]
}

#[test]
fn order_flow_reaches_thanks_in_causal_order() {
    let env = env();
    let s = env.create_session("e2e/order").unwrap().session_id;
    let mut last = None;
    for (i, cmd) in order_script().iter().enumerate() {
        last = Some(env.apply_action_at(&s, cmd, i as u64 * 1000).unwrap());
    }
    let last = last.unwrap();
    assert!(last.done);
    assert!(last.new_path.starts_with("/thanks?cart=%7B%22item%22"));
    assert_eq!(
        lines(&last)[..2],
        [
            "click/button // Place order",
            "fill/complexform // Name=John Doe; Street=123 Main Street; City=Cambridge; State=MA; ZIP=02138"
        ]
    );
    let result = env.close_session(&s).unwrap();
    assert!(result.done);
    let entries = &result.log.entries;
    for (i, e) in entries.iter().enumerate() {
        assert_eq!(e.seq, i as u64 + 1);
        if e.is_nav() {
            assert!(
                i > 0 && !entries[i - 1].is_nav(),
                "nav at {i} not preceded by an interaction"
            );
        }
    }
    assert!(crate::tasks::verify_e2e(&builtin_suite().e2e[0], &result.log));
    assert!(matches!(
        env.apply_action(&s, &ActionCommand::stop()),
        Err(EnvError::UnknownSession(_))
    ));
}

#[test]
fn checkout_requires_every_field() {
    let env = env();
    let s = env.create_session("e2e/order").unwrap().session_id;
    for cmd in &order_script()[..5] {
        env.apply_action(&s, cmd).unwrap();
    }
    let out = env.apply_action(&s, &ActionCommand::click("place-order")).unwrap();
    assert_eq!(lines(&out), ["click/button // Place order"]);
    assert!(!out.done);
    assert!(env
        .current_page(&s)
        .unwrap()
        .body_html
        .contains("Please complete all fields."));
}

#[test]
fn customize_emits_composite_once_all_groups_set() {
    let env = env();
    let s = env.create_session("e2e/add-to-cart").unwrap().session_id;
    env.apply_action(&s, &ActionCommand::navigate("/item?id=mbp-m3-pro"))
        .unwrap();
    let out = env.apply_action(&s, &ActionCommand::click("opt-memory-64gb")).unwrap();
    assert_eq!(lines(&out), ["click/button // Memory=64GB"]);
    let out = env.apply_action(&s, &ActionCommand::click("opt-storage-2tb")).unwrap();
    assert_eq!(
        lines(&out),
        [
            "click/button // Storage=2TB",
            "fill/basicform // Memory=64GB; Storage=2TB"
        ]
    );
    // re-selecting the same option changes nothing logical
    let out = env.apply_action(&s, &ActionCommand::click("opt-storage-2tb")).unwrap();
    assert_eq!(lines(&out), ["click/button // Storage=2TB"]);
    let out = env.apply_action(&s, &ActionCommand::click("add-to-cart")).unwrap();
    assert!(out.done);
    let top = CartState::highest_tier(find_item("mbp-m3-pro").unwrap());
    assert_eq!(out.new_path, format!("/cart?cart={}", encode_cart(&top)));
}

#[test]
fn url_alone_recovers_the_page() {
    let suite = builtin_suite();
    let env = Environment::new(Arc::new(suite.clone()));
    let s = env.create_session("e2e/order").unwrap().session_id;
    for cmd in &order_script()[..7] {
        env.apply_action(&s, cmd).unwrap();
    }
    let before = env.current_page(&s).unwrap();
    let path = env.current_path(&s).unwrap();
    env.close_session(&s).unwrap();
    assert_eq!(render_for_task(&suite, "e2e/order", &path).unwrap(), before);
}

#[test]
fn replay_is_byte_identical() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let files: Vec<_> = dirs
        .iter()
        .map(|dir| {
            let env = env();
            let opts = SessionOptions {
                session_id: Some("replay".into()),
                log_dir: Some(dir.path().to_path_buf()),
            };
            env.create_session_with("e2e/order", opts).unwrap();
            for (i, cmd) in order_script().iter().enumerate() {
                env.apply_action_at("replay", cmd, 1000 * i as u64).unwrap();
            }
            let result = env.close_session("replay").unwrap();
            assert_eq!(read_session_files(dir.path(), "replay").unwrap(), result.log);
            let log = std::fs::read(crate::logmodel::log_file_path(dir.path(), "replay")).unwrap();
            let meta = std::fs::read(crate::logmodel::meta_file_path(dir.path(), "replay")).unwrap();
            (log, meta, result.state.path)
        })
        .collect();
    assert_eq!(files[0], files[1]);
}

#[test]
fn concurrent_action_is_busy() {
    let env = env();
    let s = env.create_session("ind/click/button").unwrap().session_id;
    let session = env.session(&s).unwrap();
    let _held = session.lock().unwrap();
    assert!(matches!(
        env.apply_action(&s, &ActionCommand::click("btn-submit")),
        Err(EnvError::Busy)
    ));
}

#[test]
fn ingest_assigns_sequence() {
    let env = env();
    let s = env.create_session("ind/click/button").unwrap().session_id;
    assert_eq!(env.ingest_log(&s, "click/button", "Submit", 10).unwrap(), 1);
    assert_eq!(env.ingest_log(&s, "nav", "/ind/click?test=button", 20).unwrap(), 2);
    assert!(matches!(
        env.ingest_log(&s, "zoom/pinch", "x", 30),
        Err(EnvError::InvalidPayload(_))
    ));
    assert!(matches!(
        env.ingest_log(&s, "click/button", "a\nb", 30),
        Err(EnvError::InvalidPayload(_))
    ));
    assert!(matches!(
        env.ingest_log("nope", "click/button", "x", 30),
        Err(EnvError::UnknownSession(_))
    ));
    assert_eq!(
        env.result(&s).unwrap().log.lines(),
        ["click/button // Submit", "nav // /ind/click?test=button"]
    );
}

#[test]
fn menus_navigate_after_logging() {
    let env = env();
    let s = env.create_session("ind/navigatemenu/nestedmenu").unwrap().session_id;
    env.apply_action(&s, &ActionCommand::click("btn-menu")).unwrap();
    env.apply_action(&s, &ActionCommand::click("menu-account")).unwrap();
    let out = env
        .apply_action(&s, &ActionCommand::click("menu-account-privacy"))
        .unwrap();
    assert_eq!(
        lines(&out),
        [
            "navigatemenu/nestedmenu // Account > Privacy",
            "nav // /ind/menu?test=nested&page=privacy"
        ]
    );
    assert_eq!(env.current_page(&s).unwrap().title, "Privacy");
}

#[test]
fn filter_grid_composite_tracks_logical_state() {
    let env = env();
    let s = env.create_session("ind/filter/filterdatagrid").unwrap().session_id;
    let out = env
        .apply_action(&s, &ActionCommand::type_text("filter-value", "USA"))
        .unwrap();
    assert_eq!(
        lines(&out),
        ["type/text // Value=USA", "filter/filterdatagrid // Name contains USA"]
    );
    let page = env.current_page(&s).unwrap();
    assert!(page.body_html.contains("USA Outfitters") && !page.body_html.contains("Acme Corp"));
    let out = env
        .apply_action(&s, &ActionCommand::select("filter-column", "Country"))
        .unwrap();
    assert_eq!(
        lines(&out),
        [
            "select/select // Column=Country",
            "filter/filterdatagrid // Country contains USA"
        ]
    );
    let page = env.current_page(&s).unwrap();
    assert!(!page.body_html.contains("USA Outfitters") && page.body_html.contains("Acme Corp"));
}
