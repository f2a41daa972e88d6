mod common;

use common::{parser_fixture, PARSER_FIXTURES};
use planbench_core::planner::{parse_action_output, parse_action_output_with, ParseError, ParseMode};

#[test]
fn each_fixture_triggers_its_error() {
    for (name, expected) in PARSER_FIXTURES {
        let err = parse_action_output(&parser_fixture(name)).unwrap_err();
        assert_eq!(err.to_string(), expected, "{name}");
    }
}

#[test]
fn taxonomy_variants_are_all_covered() {
    let errs: Vec<ParseError> = PARSER_FIXTURES
        .iter()
        .map(|(name, _)| parse_action_output(&parser_fixture(name)).unwrap_err())
        .collect();
    assert!(errs.iter().any(|e| matches!(e, ParseError::NoJsonFound)));
    assert!(errs.iter().any(|e| matches!(e, ParseError::MissingKey { .. })));
    assert!(errs.iter().any(|e| matches!(e, ParseError::Schema(_))));
    assert!(errs.iter().any(|e| matches!(e, ParseError::BadActionType(_))));
    assert!(errs.iter().any(|e| matches!(e, ParseError::BadCoordinate { .. })));
}

#[test]
fn strict_mode_rejects_surrounding_prose() {
    let text = parser_fixture("schema.txt");
    assert_eq!(
        parse_action_output_with(&text, ParseMode::Strict),
        Err(ParseError::NoJsonFound)
    );
    let body = text.lines().nth(1).unwrap();
    assert!(matches!(
        parse_action_output_with(body, ParseMode::Strict),
        Err(ParseError::Schema(_))
    ));
}
