// Graded ranking quality over a tiny query log: reciprocal rank of the
// first relevant hit and NDCG with exponential gain.

use std::collections::BTreeMap;

use ecolens::metrics::{ndcg, reciprocal_rank, Gain, RankedList, DEFAULT_RANK_CUTOFF};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let queries = vec![
        // Perfect ordering: highest grade first.
        RankedList::new(
            "capital-of-france".into(),
            vec!["paris-page".into(), "france-overview".into(), "travel-blog".into()],
            BTreeMap::from([
                ("paris-page".to_string(), 3.0),
                ("france-overview".to_string(), 1.0),
            ]),
        )?,
        // The best document is buried at rank 3.
        RankedList::new(
            "rust-borrow-checker".into(),
            vec![
                "forum-thread".into(),
                "old-tutorial".into(),
                "reference-chapter".into(),
            ],
            BTreeMap::from([
                ("reference-chapter".to_string(), 3.0),
                ("old-tutorial".to_string(), 1.0),
            ]),
        )?,
        // Nothing relevant retrieved at all.
        RankedList::new(
            "obscure-lemma".into(),
            vec!["spam-page".into(), "unrelated".into()],
            BTreeMap::from([("missing-proof".to_string(), 2.0)]),
        )?,
    ];

    let k = DEFAULT_RANK_CUTOFF;
    let mut mrr = 0.0;
    let mut mean_ndcg = 0.0;
    for q in &queries {
        let rr = reciprocal_rank(q, k)?;
        let n = ndcg(q, k, Gain::Exponential)?;
        println!("{:<24} RR@{k} {rr:.3}   NDCG@{k} {n:.3}", q.query_id);
        mrr += rr;
        mean_ndcg += n;
    }
    let count = queries.len() as f64;
    println!();
    println!("mean reciprocal rank  {:.3}", mrr / count);
    println!("mean NDCG             {:.3}", mean_ndcg / count);
    Ok(())
}
