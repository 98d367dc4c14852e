//! Sketched query layouts, sub-layout matching, ranking and Boolean
//! combination of layout atoms.

mod layout;
mod matching;
mod parse;
mod response;
mod retrieve;

pub use layout::{detect_vacancies, query_type, DummyBlock, QueryBlock, QueryKind, QueryLayout};
pub use matching::{match_sublayout, rank_score, Match};
pub use parse::{parse_expr, parse_query, parse_spec, Expr, LayoutSpec, ParsedQuery, QuerySpec};
pub use response::{
    match_json, matches_json, run_query, BoxJson, DocBlockJson, DocumentJson, MappingJson, MatchJson, QueryResponse,
};
pub use retrieve::{
    candidate_starts, evaluate_boolean, reference_descriptor, region_predicate, retrieve, retrieve_from,
    sort_matches, DocumentHit, MatchResult,
};
