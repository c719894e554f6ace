// Exact distribution of "how many of k independent models fail", one
// Bernoulli rate per model. Dynamic programming, no sampling.

use ecolens::pbdist::{poisson_binomial_pmf, ProbVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rates = ProbVector::new(vec![0.02, 0.05, 0.05, 0.11, 0.30])?;
    let pmf = poisson_binomial_pmf(&rates);

    println!("per-model failure rates: {:?}", rates.as_slice());
    println!("expected failures: {:.4}\n", pmf.mean());
    for t in 0..pmf.mass().len() {
        let bar = "#".repeat((pmf.at(t) * 120.0).round() as usize);
        println!("P(exactly {t} fail) = {:.6}  {bar}", pmf.at(t));
    }

    let all = pmf.at(pmf.trials());
    let none = pmf.at(0);
    println!();
    println!("simultaneous failure of every model: {all:.2e}");
    println!("a fully clean run: {none:.4}");
    Ok(())
}
