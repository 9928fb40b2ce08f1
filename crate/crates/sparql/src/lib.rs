//! A SPARQL 1.1 SELECT subset over the in-memory [`climakg_core::Dataset`].
//!
//! Supported: PREFIX/BASE, SELECT [DISTINCT] with `*`, variables or
//! aggregates (COUNT, SUM, AVG, MIN, MAX), basic graph patterns with `a`,
//! `;` and `,`, FILTER, OPTIONAL, GRAPH with an IRI, nested groups,
//! GROUP BY (variables or `(expr AS ?v)`), ORDER BY, LIMIT and OFFSET.
//! Filter functions: REGEX, STR, LANG, DATATYPE, BOUND, YEAR, MONTH, DAY.

pub mod ast;
mod eval;
mod expr;
mod parser;
mod results;

use climakg_core::Dataset;

pub use eval::evaluate;
pub use parser::{parse_query, ParseError};
pub use results::{parse_results_json, parse_term, term_json, QueryResults, ResultsError, Solution};

#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
}

/// Parses and evaluates `text` against `dataset`.
pub fn execute(dataset: &Dataset, text: &str) -> Result<QueryResults, QueryError> {
    let query = parse_query(text)?;
    Ok(evaluate(dataset, &query))
}
