//! Run every identity and inequality scan and print a one-line summary each.
use riemann_aux::quad::DEFAULT_TOL;
use riemann_aux::verify::{run, LemmaSelector};

fn main() -> riemann_aux::Result<()> {
    for r in run(LemmaSelector::All, DEFAULT_TOL)? {
        println!(
            "{:<16} worst {:.4e} bound {:.4e} {}",
            format!("{:?}", r.lemma_id),
            r.worst_ratio,
            r.bound_constant,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(())
}
