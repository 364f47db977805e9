//! Parses, typechecks and pretty-prints the bundled perception program.
//!
//! cargo run --example compile_listing

use psafe::ast::pretty_print;
use psafe::sema::Ty;

fn main() {
    let typed = match psafe::compile("perception.psafe", psafe::REFERENCE_PROGRAM) {
        Ok(t) => t,
        Err(diags) => {
            eprint!(
                "{}",
                psafe::diagnostic::render_all(&diags, "perception.psafe")
            );
            std::process::exit(1);
        }
    };

    print!("{}", pretty_print(typed.program()));
    println!();

    for (g, group) in typed.program().groups.iter().enumerate() {
        println!(
            "group {g}: {} over {}",
            group.binder.kind(),
            typed.group_source(g).name()
        );
        for clause in &group.clauses {
            if let psafe::ast::ExprKind::Compare { lhs, .. } = &clause.guard.kind {
                if let Ty::Unit(unit) = typed.type_of(lhs) {
                    println!("  compares {unit}");
                }
            }
        }
    }
    let sensors: Vec<&str> = typed
        .sensor_requirements()
        .iter()
        .map(|s| s.name())
        .collect();
    println!("requires: {}", sensors.join(", "));
}
