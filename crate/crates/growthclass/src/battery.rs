//! The standard test battery: Gevrey and q-Gevrey sequences, their
//! pairwise products, and pairwise geometric-mean mixtures.

use crate::sequence::WeightSequence;

pub const GEVREY: [f64; 4] = [0.5, 1.0, 2.0, 3.0];
pub const Q_GEVREY: [f64; 2] = [1.5, 2.0];
pub const J_DEFAULT: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Gevrey,
    QGevrey,
    Product,
    Mixture,
}

#[derive(Clone, Debug)]
pub struct Member {
    pub seq: WeightSequence,
    pub kind: Kind,
    /// Only pure Gevrey members have (mg); anything with a q-Gevrey factor
    /// lacks it.
    pub has_mg: bool,
}

pub fn bases(j: usize) -> Vec<Member> {
    let mut out: Vec<Member> = GEVREY
        .iter()
        .map(|&s| Member {
            seq: WeightSequence::gevrey(s, j),
            kind: Kind::Gevrey,
            has_mg: true,
        })
        .collect();
    out.extend(Q_GEVREY.iter().map(|&q| Member {
        seq: WeightSequence::q_gevrey(q, j),
        kind: Kind::QGevrey,
        has_mg: false,
    }));
    out
}

/// Bases, then products, then mixtures; 36 members at the defaults.
pub fn standard(j: usize) -> Vec<Member> {
    let b = bases(j);
    let mut out = b.clone();
    for (kind, mix) in [(Kind::Product, false), (Kind::Mixture, true)] {
        for i in 0..b.len() {
            for k in i + 1..b.len() {
                let seq = if mix {
                    b[i].seq.mixture(&b[k].seq)
                } else {
                    b[i].seq.product(&b[k].seq)
                };
                out.push(Member {
                    seq,
                    kind,
                    has_mg: b[i].has_mg && b[k].has_mg,
                });
            }
        }
    }
    out
}
