//! The image of `psi`: the span of the classes `[e, gamma e]` over unital
//! `gamma`, accumulated until it stops growing, and its cokernel in the
//! cuspidal homology.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::ane::compute_ane;
use crate::error::{Error, Result};
use crate::exactalg::{quotient_structure, FgAbGroup, IntMatrix};
use crate::modsym::psi_class;
use crate::quadfield::QuadraticField;
use crate::unital::unital_candidates;
use crate::voronoi::{cached_homology, CuspidalHomology, GammaFlavor};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub k_max: u32,
    pub c_max: u64,
    /// Stop after this many consecutive distinct candidates that leave the
    /// span unchanged, counted once the span has full rank.
    pub stall_limit: u64,
    pub time_limit: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            k_max: 24,
            c_max: 256,
            stall_limit: 4000,
            time_limit: Duration::from_secs(100),
        }
    }
}

/// Row-echelon lattice in `Z^d`, one row per pivot column.
#[derive(Clone, Debug)]
pub struct EchelonSpan {
    rows: Vec<Option<Vec<BigInt>>>,
    /// Moduli used to keep entries small; zero for free coordinates.
    moduli: Vec<BigInt>,
}

impl EchelonSpan {
    /// The span of `m_i e_i` over the nonzero moduli.
    pub fn new(moduli: &[BigInt]) -> Self {
        let d = moduli.len();
        let mut span = EchelonSpan {
            rows: vec![None; d],
            moduli: moduli.to_vec(),
        };
        for (i, m) in moduli.iter().enumerate() {
            if !m.is_zero() {
                let mut r = vec![BigInt::zero(); d];
                r[i] = m.clone();
                span.insert(r);
            }
        }
        span
    }

    fn reduce_torsion(&self, v: &mut [BigInt], from: usize) {
        for i in from..v.len() {
            let m = &self.moduli[i];
            if !m.is_zero() {
                v[i] = v[i].mod_floor(m);
            }
        }
    }

    /// Reduce each entry above a pivot into `[0, pivot)`. Without this the
    /// ext-gcd steps blow up the entries once the rank gets into the
    /// hundreds.
    fn reduce_above_pivots(&mut self) {
        for j in 0..self.rows.len() {
            let Some(pj) = self.rows[j].take() else {
                continue;
            };
            let p = &pj[j];
            for i in 0..j {
                let Some(ri) = self.rows[i].as_mut() else {
                    continue;
                };
                if ri[j].is_negative() || &ri[j] >= p {
                    let q = ri[j].div_floor(p);
                    for (x, y) in ri.iter_mut().zip(&pj).skip(j) {
                        *x -= &q * y;
                    }
                    let from = j + 1;
                    for k in from..ri.len() {
                        let m = &self.moduli[k];
                        if !m.is_zero() {
                            ri[k] = ri[k].mod_floor(m);
                        }
                    }
                }
            }
            self.rows[j] = Some(pj);
        }
    }

    /// Add `v` to the span; returns whether the lattice grew.
    pub fn insert(&mut self, v: Vec<BigInt>) -> bool {
        let grew = self.insert_unreduced(v);
        if grew {
            self.reduce_above_pivots();
        }
        grew
    }

    fn insert_unreduced(&mut self, mut v: Vec<BigInt>) -> bool {
        let mut grew = false;
        for j in 0..v.len() {
            if v[j].is_zero() {
                continue;
            }
            let Some(h) = self.rows[j].take() else {
                if v[j].is_negative() {
                    v.iter_mut().for_each(|x| *x = -&*x);
                }
                self.reduce_torsion(&mut v, j + 1);
                self.rows[j] = Some(v);
                return true;
            };
            let (q, r) = v[j].div_mod_floor(&h[j]);
            if r.is_zero() {
                for (x, y) in v.iter_mut().zip(&h) {
                    *x -= &q * y;
                }
                self.rows[j] = Some(h);
            } else {
                let e = h[j].extended_gcd(&v[j]);
                let (a, b) = (&h[j] / &e.gcd, &v[j] / &e.gcd);
                let mut top: Vec<BigInt> = h.iter().zip(&v).map(|(x, y)| &e.x * x + &e.y * y).collect();
                let rest: Vec<BigInt> = h.iter().zip(&v).map(|(x, y)| &b * x - &a * y).collect();
                if top[j].is_negative() {
                    top.iter_mut().for_each(|x| *x = -&*x);
                }
                self.reduce_torsion(&mut top, j + 1);
                self.rows[j] = Some(top);
                v = rest;
                grew = true;
            }
            self.reduce_torsion(&mut v, j + 1);
        }
        grew
    }

    /// Whether the span is all of `Z^d`.
    pub fn is_full(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(j, r)| r.as_ref().is_some_and(|r| r[j].is_one()))
    }

    pub fn rank(&self) -> usize {
        self.rows.iter().filter(|r| r.is_some()).count()
    }

    pub fn basis(&self) -> Vec<Vec<BigInt>> {
        self.rows.iter().flatten().cloned().collect()
    }

    pub fn cokernel(&self) -> FgAbGroup {
        let d = self.rows.len();
        quotient_structure(d, &IntMatrix::from_rows(d, &self.basis()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ImageReport {
    #[serde(rename = "N")]
    pub level: u64,
    pub delta: u64,
    pub flavor: GammaFlavor,
    pub rank: usize,
    pub torsion: FgAbGroup,
    pub image_rank: usize,
    pub cokernel: FgAbGroup,
    #[serde(rename = "Q")]
    pub predicted: FgAbGroup,
    /// `|Q| / |C|`; absent when the cokernel is infinite, or when an
    /// unstabilized run leaves a cokernel whose order does not divide `|Q|`.
    pub shrinkage: Option<u64>,
    #[serde(rename = "candidates")]
    pub candidates_used: u64,
    pub stabilized: bool,
    pub early_exit: bool,
}

/// `|Q| / |C|`, required to be an integer.
pub fn shrinkage(q: &FgAbGroup, c: &FgAbGroup) -> Result<u64> {
    let (Some(qo), Some(co)) = (q.order(), c.order()) else {
        return Err(Error::InvalidArgument(format!("shrinkage of infinite groups {q}, {c}")));
    };
    let (s, r) = qo.div_rem(&co);
    if !r.is_zero() {
        return Err(Error::Consistency(format!("|C| = {co} does not divide |Q| = {qo}")));
    }
    s.to_u64()
        .ok_or_else(|| Error::Consistency(format!("shrinkage {s} out of range")))
}

/// State of one image accumulation, exposed for tests and tools.
#[derive(Clone, Debug)]
pub struct ImageRun {
    pub span: EchelonSpan,
    pub candidates_used: u64,
    pub stabilized: bool,
    pub early_exit: bool,
}

/// Accumulate `[e, gamma e]` over unital candidates.
pub fn accumulate_image(
    h: &CuspidalHomology,
    field: &QuadraticField,
    budget: &Budget,
) -> Result<ImageRun> {
    let started = Instant::now();
    let mut span = EchelonSpan::new(h.moduli());
    let mut run = ImageRun {
        span: span.clone(),
        candidates_used: 0,
        stabilized: false,
        early_exit: false,
    };
    if span.is_full() {
        run.early_exit = true;
        run.stabilized = true;
        return Ok(run);
    }
    let mut seen: HashSet<(BigInt, BigInt)> = HashSet::new();
    let mut stall = 0u64;
    for cand in unital_candidates(h.level(), field, h.flavor(), budget.k_max, budget.c_max) {
        // [e, gamma e] = [inf, A/C] depends on A mod C only.
        if started.elapsed() >= budget.time_limit {
            break;
        }
        let key = (cand.gamma.c.clone(), cand.gamma.a.mod_floor(&cand.gamma.c));
        if !seen.insert(key) {
            continue;
        }
        run.candidates_used += 1;
        let class = psi_class(&cand.gamma, h)?;
        if span.insert(class) {
            stall = 0;
            if span.is_full() {
                run.early_exit = true;
                run.stabilized = true;
                break;
            }
        } else if span.rank() == span.rows.len() {
            // The image has finite index, so a span of lower rank is never
            // the final answer and does not count towards the stall.
            stall += 1;
            if stall >= budget.stall_limit {
                run.stabilized = true;
                break;
            }
        }
    }
    run.span = span;
    Ok(run)
}

pub fn image_of_psi(n: u64, field: &QuadraticField, flavor: GammaFlavor, budget: &Budget) -> Result<ImageReport> {
    let h = cached_homology(n, flavor)?;
    let run = accumulate_image(&h, field, budget)?;
    let cokernel = run.span.cokernel();
    let free = h.group.free_rank;
    let image_rank = run.span.rank() - (h.moduli().len() - free);
    let predicted = compute_ane(field, n, flavor).q;
    // A run cut short by the budget only bounds the image from below, so a
    // cokernel not dividing |Q| there is not an inconsistency.
    let shrinkage = match shrinkage(&predicted, &cokernel) {
        Ok(s) => Some(s),
        Err(Error::Consistency(_)) if !run.stabilized => None,
        Err(Error::InvalidArgument(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(ImageReport {
        level: n,
        delta: field.delta,
        flavor,
        rank: free,
        torsion: h.group.torsion(),
        image_rank,
        cokernel,
        predicted,
        shrinkage,
        candidates_used: run.candidates_used,
        stabilized: run.stabilized,
        early_exit: run.early_exit,
    })
}
