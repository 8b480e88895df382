//! First-principles verification of the teleportation step in the full
//! multi-mode photonic state space.
//!
//! The joint state of input photon and resource lives on 2n + 1 modes: the
//! input occupies mode 0, the sender holds resource modes 1..=n and the
//! receiver modes n+1..=2n. The sender's side of the step is the (n+1)-point
//! discrete Fourier transform acting identically on the horizontal and
//! vertical creation operators of modes 0..=n, followed by photon counting
//! in those modes. Everything here is exact term-by-term bookkeeping on a
//! sparse amplitude map, so it independently checks the amplitude-level
//! model in [`crate::step`] from nothing but the mode transform.

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qubit::QubitState;
use crate::resource::ResourceSpec;
use crate::step::teleport_step;

/// Largest resource size the full state space is built for.
pub const FOCK_MAX_N: usize = 6;

/// Amplitudes with squared modulus below this are dropped after the
/// transform; exact cancellations leave residues around 1e-16 while genuine
/// amplitudes stay many orders above.
const PRUNE_NORM_SQR: f64 = 1e-28;

/// Tolerance for the aggregated outcome-distribution check.
const PROB_TOL: f64 = 1e-12;

/// Tolerance for per-pattern amplitude-modulus checks.
const MODULUS_TOL: f64 = 1e-10;

/// Photon counts (horizontal, vertical) per mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeOccupation(pub Vec<(u8, u8)>);

impl ModeOccupation {
    pub fn total_photons(&self) -> usize {
        self.0.iter().map(|&(h, v)| h as usize + v as usize).sum()
    }

    pub fn vertical_photons(&self) -> usize {
        self.0.iter().map(|&(_, v)| v as usize).sum()
    }
}

/// Sparse multi-mode photonic state over 2n + 1 modes.
#[derive(Debug, Clone)]
pub struct FockState {
    n: usize,
    amps: HashMap<ModeOccupation, Complex64>,
}

impl FockState {
    /// Builds a state from explicit occupation amplitudes. Keys must cover
    /// all 2n + 1 modes.
    pub fn from_amplitudes<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ModeOccupation, Complex64)>,
    {
        let mut amps = HashMap::new();
        for (occ, amp) in terms {
            if occ.0.len() != 2 * n + 1 {
                return Err(Error::InvalidAmplitudes(format!(
                    "occupation covers {} modes, expected {}",
                    occ.0.len(),
                    2 * n + 1
                )));
            }
            *amps.entry(occ).or_insert(Complex64::ZERO) += amp;
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ModeOccupation, &Complex64)> {
        self.amps.iter()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }
}

/// Tensor product of the input photon in mode 0 with the entangled resource
/// on modes 1..=2n.
pub fn build_joint_state(input: &QubitState, res: &ResourceSpec) -> Result<FockState> {
    let n = res.n();
    if n > FOCK_MAX_N {
        return Err(Error::FockTooLarge { n, cap: FOCK_MAX_N });
    }
    let mut amps = HashMap::new();
    for (pol_v, amp0) in [(false, input.amp_h()), (true, input.amp_v())] {
        if amp0 == Complex64::ZERO {
            continue;
        }
        for i in 0..=n {
            let c = res.amp(i);
            if c == 0.0 {
                continue;
            }
            let mut occ = Vec::with_capacity(2 * n + 1);
            occ.push(if pol_v { (0, 1) } else { (1, 0) });
            for k in 1..=n {
                occ.push(if k <= i { (0, 1) } else { (1, 0) });
            }
            for k in 1..=n {
                occ.push(if k <= i { (1, 0) } else { (0, 1) });
            }
            amps.insert(ModeOccupation(occ), amp0 * c);
        }
    }
    Ok(FockState { n, amps })
}

/// Applies the (n+1)-point Fourier transform to the creation operators of
/// modes 0..=n, identically for both polarizations, and recollects the
/// expanded polynomial into canonical occupations with the bosonic √(k!)
/// factors.
pub fn apply_fourier(state: &FockState) -> FockState {
    let n = state.n;
    let dim = n + 1;
    let scale = 1.0 / (dim as f64).sqrt();
    // ω^(k·l) via a modular table keeps equal phases bit-identical, so
    // cancellations land near machine zero.
    let omega: Vec<Complex64> = (0..dim)
        .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / dim as f64))
        .collect();
    let factorial: Vec<f64> = {
        let mut f = vec![1.0f64];
        for k in 1..=(2 * dim) {
            f.push(f[k - 1] * k as f64);
        }
        f
    };

    let mut out: HashMap<ModeOccupation, Complex64> = HashMap::new();
    for (occ, &amp) in &state.amps {
        // Photons to redistribute and the source normalization.
        let mut photons: Vec<(bool, usize)> = Vec::new();
        let mut denom = 1.0;
        for (k, &(h, v)) in occ.0.iter().take(dim).enumerate() {
            for _ in 0..h {
                photons.push((false, k));
            }
            for _ in 0..v {
                photons.push((true, k));
            }
            denom *= factorial[h as usize] * factorial[v as usize];
        }

        let mut partial: HashMap<Vec<(u8, u8)>, Complex64> = HashMap::new();
        partial.insert(vec![(0, 0); dim], amp / denom.sqrt());
        for &(pol_v, k) in &photons {
            let mut next: HashMap<Vec<(u8, u8)>, Complex64> =
                HashMap::with_capacity(partial.len() * dim);
            for (pocc, pamp) in partial {
                for l in 0..dim {
                    let mut nocc = pocc.clone();
                    if pol_v {
                        nocc[l].1 += 1;
                    } else {
                        nocc[l].0 += 1;
                    }
                    let w = pamp * omega[(k * l) % dim] * scale;
                    *next.entry(nocc).or_insert(Complex64::ZERO) += w;
                }
            }
            partial = next;
        }

        for (pocc, pamp) in partial {
            let mut bose = 1.0;
            for &(h, v) in &pocc {
                bose *= factorial[h as usize] * factorial[v as usize];
            }
            let mut full = pocc;
            full.extend_from_slice(&occ.0[dim..]);
            *out.entry(ModeOccupation(full)).or_insert(Complex64::ZERO) +=
                pamp * bose.sqrt();
        }
    }
    out.retain(|_, a| a.norm_sqr() >= PRUNE_NORM_SQR);
    FockState { n, amps: out }
}

/// Projection of the post-transform state onto one photon-count pattern of
/// the measured modes.
#[derive(Debug, Clone)]
pub struct PatternResult {
    /// Occupation of the measured modes 0..=n.
    pub pattern: ModeOccupation,
    /// Total vertically polarized photons in the pattern.
    pub m: usize,
    /// Probability of observing this pattern.
    pub prob: f64,
    /// Receiver-side conditional state, normalized, sorted by occupation.
    pub bob_state: Vec<(ModeOccupation, Complex64)>,
    /// The qubit recovered from mode n + m, up to phase; None on the
    /// failure branches m = 0 and m = n + 1.
    pub extracted_qubit: Option<QubitState>,
}

/// Projects onto every photon-count pattern of modes 0..=n and extracts the
/// conditional receiver state, plus the qubit where 1 ≤ m ≤ n.
pub fn measure_and_extract(state: &FockState) -> Result<Vec<PatternResult>> {
    let n = state.n;
    let dim = n + 1;
    let mut groups: HashMap<Vec<(u8, u8)>, Vec<(Vec<(u8, u8)>, Complex64)>> = HashMap::new();
    for (occ, &amp) in &state.amps {
        let alice = occ.0[..dim].to_vec();
        let bob = occ.0[dim..].to_vec();
        groups.entry(alice).or_default().push((bob, amp));
    }

    let mut results = Vec::with_capacity(groups.len());
    for (alice, mut terms) in groups {
        let pattern = ModeOccupation(alice);
        let prob: f64 = terms.iter().map(|(_, a)| a.norm_sqr()).sum();
        let m = pattern.vertical_photons();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let inv = 1.0 / prob.sqrt();
        let bob_state: Vec<(ModeOccupation, Complex64)> = terms
            .iter()
            .map(|(occ, a)| (ModeOccupation(occ.clone()), a * inv))
            .collect();
        let extracted_qubit = if (1..=n).contains(&m) {
            Some(extract_qubit(&pattern, &bob_state, n, m)?)
        } else {
            None
        };
        results.push(PatternResult {
            pattern,
            m,
            prob,
            bob_state,
            extracted_qubit,
        });
    }
    results.sort_by(|a, b| a.pattern.cmp(&b.pattern));
    Ok(results)
}

/// Pulls the qubit out of receiver mode n + m, verifying that all other
/// receiver modes hold the fixed bystander photons (H below the qubit mode,
/// V above it).
fn extract_qubit(
    pattern: &ModeOccupation,
    bob_state: &[(ModeOccupation, Complex64)],
    n: usize,
    m: usize,
) -> Result<QubitState> {
    let fail = |reason: String| Error::ExtractionFailed {
        pattern: pattern.0.clone(),
        reason,
    };
    let mut amp_h = Complex64::ZERO;
    let mut amp_v = Complex64::ZERO;
    for (occ, amp) in bob_state {
        // occ index j is mode n + 1 + j; the qubit sits at j = m − 1.
        for (j, &(h, v)) in occ.0.iter().enumerate() {
            let expected = match (j + 1).cmp(&m) {
                std::cmp::Ordering::Less => Some((1, 0)),
                std::cmp::Ordering::Greater => Some((0, 1)),
                std::cmp::Ordering::Equal => None,
            };
            if let Some(exp) = expected {
                if (h, v) != exp {
                    return Err(fail(format!(
                        "bystander mode {} holds ({h}, {v}), expected {exp:?}",
                        n + 1 + j
                    )));
                }
            }
        }
        match occ.0[m - 1] {
            (1, 0) => amp_h += amp,
            (0, 1) => amp_v += amp,
            (h, v) => {
                return Err(fail(format!(
                    "qubit mode {} holds ({h}, {v}) photons",
                    n + m
                )))
            }
        }
    }
    QubitState::normalized(amp_h, amp_v)
        .map_err(|_| fail("no amplitude on either rail of the qubit mode".into()))
}

/// Outcome of checking the full-state model against the amplitude-level step.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub n: usize,
    /// Largest |oracle − model| over the aggregated outcome probabilities.
    pub max_prob_deviation: f64,
    /// Largest modulus mismatch between extracted and predicted amplitudes.
    pub max_modulus_deviation: f64,
    /// Per-pattern relative phase between the extracted and predicted qubit
    /// (arg X − arg Y); comparable across inputs for the same pattern.
    pub pattern_phases: Vec<(ModeOccupation, f64)>,
    /// Number of measurement patterns examined.
    pub patterns_checked: usize,
}

/// Builds the joint state, applies the transform, measures, and checks that
/// (a) aggregated outcome probabilities match the amplitude-level step,
/// (b) each success pattern carries the predicted qubit up to one phase, and
/// (c) failure branches collapse the receiver to a fixed product state.
pub fn verify_effective_step(input: &QubitState, res: &ResourceSpec) -> Result<VerificationReport> {
    let n = res.n();
    let post = apply_fourier(&build_joint_state(input, res)?);
    let patterns = measure_and_extract(&post)?;
    let model = teleport_step(input, res)?;

    // (a) aggregated m-distribution.
    let mut by_m = vec![0.0f64; n + 2];
    for p in &patterns {
        by_m[p.m] += p.prob;
    }
    let mut max_prob_deviation = 0.0f64;
    for m in 0..=(n + 1) {
        let dev = (by_m[m] - model.entry(m).prob).abs();
        max_prob_deviation = max_prob_deviation.max(dev);
        if dev > PROB_TOL {
            return Err(Error::VerificationFailed(format!(
                "outcome m = {m}: full-state probability {} vs model {}",
                by_m[m],
                model.entry(m).prob
            )));
        }
    }

    // (b) per-pattern amplitudes; (c) failure branches.
    let mut max_modulus_deviation = 0.0f64;
    let mut pattern_phases = Vec::new();
    for p in &patterns {
        if p.m >= 1 && p.m <= n {
            let (dev, phase) = check_success_pattern(input, res, p)?;
            max_modulus_deviation = max_modulus_deviation.max(dev);
            if let Some(phase) = phase {
                pattern_phases.push((p.pattern.clone(), phase));
            }
        } else {
            check_failure_pattern(p)?;
        }
    }

    Ok(VerificationReport {
        n,
        max_prob_deviation,
        max_modulus_deviation,
        pattern_phases,
        patterns_checked: patterns.len(),
    })
}

/// Verifies one success pattern against the predicted amplitudes
/// (α c(m), β c(m−1)) and returns (modulus deviation, relative phase).
fn check_success_pattern(
    input: &QubitState,
    res: &ResourceSpec,
    p: &PatternResult,
) -> Result<(f64, Option<f64>)> {
    let qubit = p.extracted_qubit.as_ref().expect("success pattern");
    let scale = p.prob.sqrt();
    let got_h = qubit.amp_h() * scale;
    let got_v = qubit.amp_v() * scale;
    let pred_h = input.amp_h() * res.amp(p.m);
    let pred_v = input.amp_v() * res.amp(p.m - 1);

    let ratio = |got: Complex64, pred: Complex64| -> Result<Option<Complex64>> {
        if pred.norm() < 1e-9 {
            if got.norm() > MODULUS_TOL {
                return Err(Error::VerificationFailed(format!(
                    "pattern {:?}: amplitude {} appears on a rail the model predicts dark",
                    p.pattern.0,
                    got.norm()
                )));
            }
            return Ok(None);
        }
        Ok(Some(got / pred))
    };
    let x = ratio(got_h, pred_h)?;
    let y = ratio(got_v, pred_v)?;
    match (x, y) {
        (Some(x), Some(y)) => {
            let dev = (x.norm() - y.norm()).abs();
            if dev > MODULUS_TOL {
                return Err(Error::VerificationFailed(format!(
                    "pattern {:?}: rail modulus mismatch {} exceeds tolerance",
                    p.pattern.0, dev
                )));
            }
            Ok((dev, Some((x / y).arg())))
        }
        // One rail dark on the input side: no relative phase to compare.
        _ => Ok((0.0, None)),
    }
}

/// Failure branches must collapse the receiver to a single basis state (all
/// V photons for m = 0, all H for m = n + 1), independent of the input.
fn check_failure_pattern(p: &PatternResult) -> Result<()> {
    if p.bob_state.len() != 1 {
        return Err(Error::VerificationFailed(format!(
            "failure pattern {:?} leaves {} receiver terms, expected 1",
            p.pattern.0,
            p.bob_state.len()
        )));
    }
    let occ = &p.bob_state[0].0;
    let expected = if p.m == 0 { (0u8, 1u8) } else { (1u8, 0u8) };
    if occ.0.iter().any(|&c| c != expected) {
        return Err(Error::VerificationFailed(format!(
            "failure pattern {:?} has receiver occupation {:?}",
            p.pattern.0, occ.0
        )));
    }
    Ok(())
}

/// Checks that per-pattern phases agree across several verification reports
/// (the phase correction depends on the pattern, never on the input).
/// Returns the largest observed spread.
pub fn check_phase_consistency(reports: &[VerificationReport]) -> Result<f64> {
    let mut reference: HashMap<&ModeOccupation, f64> = HashMap::new();
    let mut max_spread = 0.0f64;
    for report in reports {
        for (pattern, phase) in &report.pattern_phases {
            match reference.entry(pattern) {
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(*phase);
                }
                std::collections::hash_map::Entry::Occupied(e) => {
                    let d = angle_difference(*phase, *e.get());
                    max_spread = max_spread.max(d);
                    if d > MODULUS_TOL {
                        return Err(Error::VerificationFailed(format!(
                            "pattern {:?}: phase {} vs {} across inputs",
                            pattern.0,
                            phase,
                            e.get()
                        )));
                    }
                }
            }
        }
    }
    Ok(max_spread)
}

fn angle_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resource::{
        geometric_monotone_resource, geometric_peak_resource, uniform_resource,
    };
    use approx::assert_abs_diff_eq;

    fn occ(pairs: &[(u8, u8)]) -> ModeOccupation {
        ModeOccupation(pairs.to_vec())
    }

    #[test]
    fn joint_state_of_horizontal_input() {
        let state =
            build_joint_state(&QubitState::horizontal(), &uniform_resource(2).unwrap()).unwrap();
        assert_eq!(state.len(), 3);
        let expect = 1.0 / 3.0_f64.sqrt();
        for (o, amp) in state.terms() {
            assert_eq!(o.0[0], (1, 0));
            assert_abs_diff_eq!(amp.re, expect, epsilon = 1e-15);
            assert_eq!(amp.im, 0.0);
        }
        assert_abs_diff_eq!(state.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn joint_state_of_vertical_input() {
        let state =
            build_joint_state(&QubitState::vertical(), &uniform_resource(2).unwrap()).unwrap();
        assert_eq!(state.len(), 3);
        for (o, _) in state.terms() {
            assert_eq!(o.0[0], (0, 1));
        }
    }

    #[test]
    fn joint_state_of_superposed_input() {
        let res = geometric_peak_resource(2, 1.29663).unwrap();
        let state = build_joint_state(&QubitState::plus(), &res).unwrap();
        assert_eq!(state.len(), 6);
        assert_abs_diff_eq!(state.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn joint_state_size_cap() {
        assert!(matches!(
            build_joint_state(&QubitState::plus(), &uniform_resource(8).unwrap()),
            Err(Error::FockTooLarge { .. })
        ));
    }

    #[test]
    fn fourier_spreads_single_photon_evenly() {
        // One photon in mode 0 of a 5-mode (n = 2) register.
        let state = FockState::from_amplitudes(
            2,
            [(occ(&[(1, 0), (0, 0), (0, 0), (0, 0), (0, 0)]), Complex64::ONE)],
        )
        .unwrap();
        let out = apply_fourier(&state);
        assert_eq!(out.len(), 3);
        for (_, amp) in out.terms() {
            assert_abs_diff_eq!(amp.norm(), 1.0 / 3.0_f64.sqrt(), epsilon = 1e-14);
        }
        assert_abs_diff_eq!(out.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fourier_handles_bunched_photons() {
        // Two H photons in mode 1: (F h₁†)² expands with multinomial weights
        // and a √2 bunching factor on doubly occupied modes.
        let state = FockState::from_amplitudes(
            2,
            [(occ(&[(0, 0), (2, 0), (0, 0), (0, 0), (0, 0)]), Complex64::ONE)],
        )
        .unwrap();
        let out = apply_fourier(&state);
        assert_abs_diff_eq!(out.norm_sqr(), 1.0, epsilon = 1e-12);
        // Doubly occupied target modes carry |amp| = 1/3, split pairs √2/3.
        for (o, amp) in out.terms() {
            let doubly = o.0.iter().any(|&(h, _)| h == 2);
            let expect = if doubly { 1.0 / 3.0 } else { 2.0_f64.sqrt() / 3.0 };
            assert_abs_diff_eq!(amp.norm(), expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn fourier_preserves_norm_on_random_states() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for n in [2usize, 4] {
            for _ in 0..20 {
                // Random 3-photon content on the measured modes.
                let mut pairs = vec![(0u8, 0u8); 2 * n + 1];
                for _ in 0..3 {
                    let mode = rng.random_range(0..=n);
                    if rng.random_bool(0.5) {
                        pairs[mode].0 += 1;
                    } else {
                        pairs[mode].1 += 1;
                    }
                }
                let state =
                    FockState::from_amplitudes(n, [(ModeOccupation(pairs), Complex64::ONE)])
                        .unwrap();
                let out = apply_fourier(&state);
                assert_abs_diff_eq!(out.norm_sqr(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn horizontal_input_never_yields_full_vertical_count() {
        let res = uniform_resource(2).unwrap();
        let post = apply_fourier(&build_joint_state(&QubitState::horizontal(), &res).unwrap());
        let patterns = measure_and_extract(&post).unwrap();
        let p3: f64 = patterns.iter().filter(|p| p.m == 3).map(|p| p.prob).sum();
        assert_abs_diff_eq!(p3, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pattern_probabilities_sum_to_one() {
        let res = geometric_monotone_resource(2, 2.0).unwrap();
        let post = apply_fourier(&build_joint_state(&QubitState::plus(), &res).unwrap());
        let patterns = measure_and_extract(&post).unwrap();
        let total: f64 = patterns.iter().map(|p| p.prob).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn effective_step_verified_for_uniform_resource() {
        let report =
            verify_effective_step(&QubitState::plus(), &uniform_resource(2).unwrap()).unwrap();
        assert!(report.max_prob_deviation <= PROB_TOL);
        assert!(report.max_modulus_deviation <= MODULUS_TOL);
        assert!(report.patterns_checked > 0);
    }

    #[test]
    fn effective_step_verified_for_peaked_resource() {
        let res = geometric_peak_resource(2, 1.29663).unwrap();
        let input = QubitState::new(
            Complex64::new(0.6, 0.0),
            Complex64::new(0.48, 0.64),
        )
        .unwrap();
        let report = verify_effective_step(&input, &res).unwrap();
        assert!(report.max_prob_deviation <= PROB_TOL);
    }

    #[test]
    fn horizontal_input_distribution_is_resource_squared() {
        let res = geometric_monotone_resource(2, 0.5).unwrap();
        let post = apply_fourier(&build_joint_state(&QubitState::horizontal(), &res).unwrap());
        let patterns = measure_and_extract(&post).unwrap();
        let mut by_m = [0.0f64; 4];
        for p in &patterns {
            by_m[p.m] += p.prob;
        }
        for m in 0..=2 {
            assert_abs_diff_eq!(by_m[m], res.amp(m) * res.amp(m), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(by_m[3], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn phases_constant_across_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let res = geometric_peak_resource(2, 1.29663).unwrap();
        let mut reports = Vec::new();
        for _ in 0..6 {
            let raw_h = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            let raw_v = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            let input = QubitState::normalized(raw_h, raw_v).unwrap();
            reports.push(verify_effective_step(&input, &res).unwrap());
        }
        let spread = check_phase_consistency(&reports).unwrap();
        assert!(spread <= MODULUS_TOL, "phase spread {spread}");
    }
}
