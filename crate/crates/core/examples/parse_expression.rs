//! Model functions as text: parsing, evaluation, derivatives, range checks,
//! and the error offsets reported for bad input.
//!
//! `cargo run --example parse_expression -- "1.5+0.3*sin(2*pi*t)"`

use multistable::expr::{fd_derivative, parse_expr, validate_range, FuncSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = std::env::args().nth(1).unwrap_or_else(|| "1.5+0.3*sin(2*pi*t)".into());
    let f = FuncSpec::parse(&source, (0.0, 1.0))?;
    println!("parsed: {}", f.ast());
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!(
            "  f({t:.2}) = {:+.12}   f'({t:.2}) ~ {:+.8}",
            f.eval(t)?,
            fd_derivative(f.ast(), t, 1e-5)?
        );
    }
    let range = validate_range(&f, 0.0, 2.0, 201)?;
    println!("range on [0,1]: [{:.6}, {:.6}], inside (0,2): {}", range.min, range.max, range.passed);

    for bad in ["1.5+", "2*)", "x+1", "min(1)", "sqrt(t-2)"] {
        match parse_expr(bad).and_then(|a| a.eval(0.5)) {
            Ok(v) => println!("{bad:>10} -> {v}"),
            Err(e) => println!("{bad:>10} -> {e}"),
        }
    }
    Ok(())
}
