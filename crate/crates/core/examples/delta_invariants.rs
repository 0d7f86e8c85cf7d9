// δ(n_1, …, n_k) and its supremum counterpart for every admissible tuple.

use chen_bounds::forge::{forge_instance, GeneratorSpec};
use chen_bounds::inequalities::{InequalityContext, Tolerances};
use chen_bounds::invariants::{constants_c_b, enumerate_tuples, SearchBudget, Witness};

pub fn run_example() -> anyhow::Result<()> {
    let n = 5;
    let s = forge_instance(&GeneratorSpec::sasakian(5, n, 3))?;
    let ctx = InequalityContext::new(&s, Tolerances::default());
    let budget = SearchBudget { samples: 1024, ..SearchBudget::with_seed(3) };
    println!("tau = {:.5}", ctx.tau());
    for t in enumerate_tuples(n) {
        let (d, dt) = ctx.table().delta_pair(&t, &budget)?;
        let (c, b) = constants_c_b(n, &t)?;
        let slack = match &d.witness {
            Witness::Tuple(ls) => ctx.delta_tuple(&t, ls)?.slack,
            _ => f64::NAN,
        };
        println!("{:<8} delta {:>9.5}  tilde {:>9.5}  c {c:>6.3}  b {b:>4}  slack {slack:.5}", t.to_string(), d.value, dt.value);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
