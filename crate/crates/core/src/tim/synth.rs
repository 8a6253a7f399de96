use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::topology::{check_p1_p2, chromatic_number, color_masks, reduced_conflict_graph, two_coloring, Topology};
use super::{Scheme, SparseAssignment, TimError};
use crate::exactla::{ExactMatrix, IndexSet, Rational};
use crate::matching::{max_matching, SupportGraph};

/// How users without outgoing reduced-graph edges are placed in the two slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActivationPolicy {
    /// Such users transmit in both slots.
    Plain,
    /// Start from both slots, then in index order drop to slot 2 or slot 1
    /// alone whenever every receiver stays decodable.
    #[default]
    MinimalActivation,
}

/// Source of the generic entries in exclusive-scheme beamformers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GenericEntries {
    /// Power columns `(p, p², …)` of consecutive primes, fully deterministic.
    #[default]
    Primes,
    /// Uniform integers in `[1, 2^16]` from a seeded stream.
    Random(u64),
}

/// Exclusive-alignment design and the colorings behind it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusiveDesign {
    pub scheme: Scheme,
    pub assignment: SparseAssignment,
    pub n: usize,
    pub m: usize,
    pub tau: usize,
    /// Chromatic number of the reduced conflict graph.
    pub chi: usize,
    /// Colors used for the alignment sets.
    pub chi_alignment: usize,
    /// `chi_alignment < chi`: fewer sparse sets were needed than the bound assumes.
    pub divergence: bool,
    /// `chi = 1`, so the design is the two-slot half-rate scheme.
    pub half_dof_route: bool,
}

fn require_properties(t: &Topology) -> Result<(), TimError> {
    let report = check_p1_p2(t);
    if report.holds() {
        Ok(())
    } else {
        Err(TimError::Precondition(format!(
            "topology violates {}",
            match (report.p1, report.p2) {
                (false, false) => "P1 and P2",
                (false, true) => "P1",
                _ => "P2",
            }
        )))
    }
}

/// Whether the reduced conflict graph is bipartite.
pub fn half_dof_feasible(t: &Topology) -> bool {
    two_coloring(&reduced_conflict_graph(t)).is_some()
}

/// Symmetric linear DoF `min(1/2, (χ+1)/(3χ))` with `χ` the chromatic number
/// of the reduced conflict graph.
pub fn ldof_sym(t: &Topology) -> Result<Rational, TimError> {
    if t.link_count() == 0 {
        return Err(TimError::Precondition("topology has no interference link".into()));
    }
    require_properties(t)?;
    let chi = chromatic_number(&reduced_conflict_graph(t))?;
    let chi = BigInt::from(chi);
    let v = Rational::new(chi.clone() + 1, chi * 3);
    Ok(v.min(Rational::new(1.into(), 2.into())))
}

/// Receiver-wise decodability of a one-stream scheme in the generic sense:
/// the term rank of desired plus interference equals one plus the term rank
/// of the interference alone.
pub fn structurally_decodable(t: &Topology, s: &Scheme) -> Result<Vec<bool>, TimError> {
    s.check_against(t)?;
    if s.symmetric_m() != Some(1) {
        return Err(TimError::Precondition("structural check needs one stream per user".into()));
    }
    let patterns: Vec<u64> = (0..s.k())
        .map(|i| s.beamformer(i).column_support(0).mask())
        .collect();
    Ok(decodable_patterns(t, s.n(), &patterns))
}

fn decodable_patterns(t: &Topology, n: usize, patterns: &[u64]) -> Vec<bool> {
    let term_rank = |cols: Vec<u64>| max_matching(&SupportGraph::from_adjacency(n, cols).expect("masks within rows"));
    (0..t.k())
        .map(|j| {
            let interf: Vec<u64> = t.interferers(j).iter().map(|i| patterns[i]).collect();
            let base = term_rank(interf.clone());
            let mut all = interf;
            all.push(patterns[j]);
            term_rank(all) == base + 1
        })
        .collect()
}

fn unit_pattern_scheme(n: usize, patterns: &[u64]) -> Result<Scheme, TimError> {
    let cols = patterns
        .iter()
        .map(|&p| {
            let col = (0..n)
                .map(|r| Rational::from_integer(BigInt::from(p >> r & 1)))
                .collect::<Vec<_>>();
            ExactMatrix::from_columns(n, &[col])
        })
        .collect::<Result<Vec<_>, _>>()?;
    Scheme::new(n, cols)
}

/// Two-slot scheme with one stream per user.
pub fn synth_half_dof_scheme(t: &Topology) -> Result<Scheme, TimError> {
    synth_half_dof_scheme_with(t, ActivationPolicy::default())
}

/// Two-slot scheme: a user with an outgoing reduced edge transmits only in the
/// slot of its color class (class 0 uses slot 1); the others follow `policy`.
pub fn synth_half_dof_scheme_with(t: &Topology, policy: ActivationPolicy) -> Result<Scheme, TimError> {
    let g = reduced_conflict_graph(t);
    let color = two_coloring(&g)
        .ok_or_else(|| TimError::Precondition("reduced conflict graph is not bipartite".into()))?;
    let mut patterns: Vec<u64> = (0..t.k())
        .map(|v| if g.has_outgoing(v) { 1 << color[v] } else { 0b11 })
        .collect();
    if policy == ActivationPolicy::MinimalActivation {
        for v in (0..t.k()).filter(|&v| !g.has_outgoing(v)) {
            for candidate in [0b10, 0b01] {
                let prev = patterns[v];
                patterns[v] = candidate;
                if decodable_patterns(t, 2, &patterns).into_iter().all(|d| d) {
                    break;
                }
                patterns[v] = prev;
            }
        }
    }
    if !decodable_patterns(t, 2, &patterns).into_iter().all(|d| d) {
        return Err(TimError::Internal("two-slot scheme is not decodable".into()));
    }
    unit_pattern_scheme(2, &patterns)
}

/// Exclusive-alignment scheme at `n = 3χ`, `m = χ + 1`, or the two-slot
/// scheme when the reduced conflict graph has no edges.
pub fn synth_exclusive_scheme(t: &Topology) -> Result<ExclusiveDesign, TimError> {
    synth_exclusive_scheme_with(t, GenericEntries::default())
}

pub fn synth_exclusive_scheme_with(t: &Topology, entries: GenericEntries) -> Result<ExclusiveDesign, TimError> {
    require_properties(t)?;
    let chi = chromatic_number(&reduced_conflict_graph(t))?;
    if chi == 1 {
        let scheme = synth_half_dof_scheme(t)?;
        return Ok(ExclusiveDesign {
            assignment: SparseAssignment::empty(2, 1, t.k()),
            scheme,
            n: 2,
            m: 1,
            tau: 1,
            chi,
            chi_alignment: 0,
            divergence: false,
            half_dof_route: true,
        });
    }
    synth_exclusive_scheme_at(t, 3 * chi, chi + 1, entries)
}

/// Coloring of the alignment receivers where `r` and `d` conflict when one
/// transmits into the other's alignment set. Returns `(colors used, color per receiver)`.
fn alignment_coloring(t: &Topology) -> Result<(usize, Vec<Option<usize>>), TimError> {
    let nodes = t.alignment_receivers();
    let adj: Vec<u64> = nodes
        .iter()
        .map(|&r| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(_, &d)| d != r && (t.interferers(d).contains(r) || t.interferers(r).contains(d)))
                .fold(0u64, |acc, (p, _)| acc | 1 << p)
        })
        .collect();
    let (used, colors) = color_masks(&adj)?;
    let mut out = vec![None; t.k()];
    for (p, &r) in nodes.iter().enumerate() {
        out[r] = Some(colors[p]);
    }
    Ok((used, out))
}

struct EntrySource {
    kind: GenericEntries,
    rng: Option<ChaCha8Rng>,
    prime: u64,
}

impl EntrySource {
    fn new(kind: GenericEntries) -> Self {
        let rng = match kind {
            GenericEntries::Primes => None,
            GenericEntries::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        EntrySource { kind, rng, prime: 1 }
    }

    /// A fresh column of length `n`. Prime columns are `(p, p², …, pⁿ)` for a
    /// new prime `p`, so every square submatrix over distinct primes is a
    /// generalized Vandermonde determinant and nonzero.
    fn column(&mut self, n: usize) -> Vec<Rational> {
        match self.kind {
            GenericEntries::Primes => {
                self.prime = next_prime(self.prime);
                let p = BigInt::from(self.prime);
                let mut power = p.clone();
                (0..n)
                    .map(|_| {
                        let v = Rational::from_integer(power.clone());
                        power *= &p;
                        v
                    })
                    .collect()
            }
            GenericEntries::Random(_) => {
                let rng = self.rng.as_mut().expect("seeded");
                (0..n)
                    .map(|_| Rational::from_integer(BigInt::from(rng.gen_range(1..=1u64 << 16))))
                    .collect()
            }
        }
    }
}

fn next_prime(after: u64) -> u64 {
    (after + 1..)
        .find(|&p| p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0))
        .expect("primes are unbounded")
}

/// Exclusive-alignment scheme at an explicit `(n, m)` with `τ = 3m − n`.
pub fn synth_exclusive_scheme_at(
    t: &Topology,
    n: usize,
    m: usize,
    entries: GenericEntries,
) -> Result<ExclusiveDesign, TimError> {
    require_properties(t)?;
    if m == 0 || m > n {
        return Err(TimError::Precondition(format!("m = {m} must lie in 1..={n}")));
    }
    if n > crate::exactla::MAX_UNIVERSE {
        return Err(TimError::Capacity(format!("n = {n} exceeds {}", crate::exactla::MAX_UNIVERSE)));
    }
    let tau = 3 * m as i64 - n as i64;
    if tau <= 0 {
        return Err(TimError::Precondition(format!("tau = 3m - n = {tau} must be positive")));
    }
    let tau = tau as usize;
    if m < tau {
        return Err(TimError::Precondition(format!("m = {m} is below tau = {tau}")));
    }
    let chi = chromatic_number(&reduced_conflict_graph(t))?;
    let (chi_alignment, colors) = alignment_coloring(t)?;
    if chi_alignment > chi {
        return Err(TimError::Internal(format!(
            "alignment sets need {chi_alignment} colors, more than chi = {chi}"
        )));
    }
    if chi_alignment * tau > n {
        return Err(TimError::Precondition(format!(
            "{chi_alignment} disjoint sets of size {tau} do not fit in {n} slots"
        )));
    }
    let sets: Vec<Option<IndexSet>> = colors
        .iter()
        .map(|c| c.map(|c| IndexSet::from_zero_based(n, c * tau..(c + 1) * tau)).transpose())
        .collect::<Result<_, _>>()?;
    let mut member_of = vec![None; t.k()];
    for r in t.alignment_receivers() {
        for i in t.interferers(r).iter() {
            member_of[i] = Some(r);
        }
    }
    let mut source = EntrySource::new(entries);
    let mut beamformers = Vec::with_capacity(t.k());
    for (i, member) in member_of.iter().enumerate() {
        let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(m);
        if let Some(r) = member {
            let j = sets[*r].expect("alignment receivers are colored");
            for row in j.iter() {
                let mut col = vec![Rational::from_integer(0.into()); n];
                col[row] = Rational::from_integer(1.into());
                cols.push(col);
            }
        }
        while cols.len() < m {
            cols.push(source.column(n));
        }
        let b = ExactMatrix::from_columns(n, &cols)?;
        if !b.has_full_column_rank() {
            return Err(TimError::Internal(format!("beamformer {} came out rank deficient", i + 1)));
        }
        beamformers.push(b);
    }
    Ok(ExclusiveDesign {
        scheme: Scheme::new(n, beamformers)?,
        assignment: SparseAssignment { n, tau, sets },
        n,
        m,
        tau,
        chi,
        chi_alignment,
        divergence: chi_alignment < chi,
        half_dof_route: false,
    })
}
