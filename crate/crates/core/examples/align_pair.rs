//! Aligns two unit sequences and prints every non-overlapping match.
//!
//!     cargo run --example align_pair
//!     cargo run --example align_pair -- "1 2 3 9 9 1 2 3" "1 2 3" 3

use termdisc::aligner::{fill_scoring_matrix, find_matches, ScoringScheme};

fn parse(s: &str) -> Vec<u32> {
    s.split_whitespace().map(|t| t.parse().expect("units are integers")).collect()
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (x, y, tau) = match args.as_slice() {
        [x, y, tau] => (parse(x), parse(y), tau.parse().expect("tau is an integer")),
        [x, y] => (parse(x), parse(y), 1),
        _ => (parse("42 80 70 49 78 56 95 40 93 1"), parse("42 80 70 49 78 81 56 95 23 93 1"), 6),
    };
    let scheme = ScoringScheme::default();

    let h = fill_scoring_matrix(&x, &y, &scheme);
    println!("best cell value {}", h.max_value());

    for (n, m) in find_matches(&x, &y, &scheme, tau).iter().enumerate() {
        let cols = m.columns(&x, &y);
        let show = |side: fn(&(Option<u32>, Option<u32>)) -> Option<u32>| {
            cols.iter().map(|c| side(c).map_or(" -".to_owned(), |u| format!("{u:>2}"))).collect::<Vec<_>>().join(" ")
        };
        println!("match {n}: score {}, x[{}..={}] y[{}..={}]", m.score, m.x_span.0, m.x_span.1, m.y_span.0, m.y_span.1);
        println!("  x: {}", show(|c| c.0));
        println!("  y: {}", show(|c| c.1));
    }
}
