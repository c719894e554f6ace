// Token-level F1 and bigram ROUGE-2 between reference and generated text.
// Normalization is lowercasing plus whitespace splitting; scores are the
// harmonic mean of multiset precision and recall.

use ecolens::metrics::{rouge_2, token_f1};

fn main() {
    let reference = "The committee approved the budget after a long debate";
    let candidates = [
        "The committee approved the budget after a long debate",
        "the committee approved the budget",
        "After a long debate the budget was approved by the committee",
        "Stocks rallied on Friday afternoon",
    ];

    println!("reference: {reference}\n");
    println!("{:<62} {:>8} {:>8}", "candidate", "tok F1", "ROUGE-2");
    for c in candidates {
        println!("{c:<62} {:>8.3} {:>8.3}", token_f1(reference, c), rouge_2(reference, c));
    }
}
