//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use rand::Rng;
use statrs::distribution::{Binomial, DiscreteCDF};

use qplab::crypto::{half_state, hiding_check, owsg_experiment, prs_experiment, CommitmentSession, OwsgAttack, OwsgScheme, PrsScheme};
use qplab::hamlab::{
    cook_levin, cook_levin_variant, history_state, honest_history_circuit, random_verifier, BSource, ClockLayout, HamiltonianInstance,
    LocalTerm, Variant, DEFAULT_PENALTY,
};
use qplab::proto::{efi_accept_exact, maxent_round_pass, mixedness_accept_exact, optimal_cheat, public_coin_accept_exact, EfiPair, ProverStrategy, Purified, QsdInstance};
use qplab::qcore::linalg::{cr, CMat, CVec};
use qplab::qcore::{
    fidelity, haar_state, haar_unitary, min_eigenpair, random_density, rng_for, trace_distance, DensityMatrix, GateCircuit, GateKind,
    PureState, QRng,
};
use qplab::qprim::{sample_trajectory, sequential_measure, swap_test};
use qplab::verify::lhwm::{step2_l_target, w_l_expectation};
use qplab::verify::lhwp::{lhwp_accept_rate, pure_budget};
use qplab::verify::{
    bernoulli_verifier, gen_no, gen_yes, lhwm_exact, lhwm_verify, lhwp_exact, qor_accept_exact, search_to_decision, DontCare,
    LhwmConfig, LhwmWitness, PrefixOracle, Witness,
};

type Outcome = Result<String, String>;

/// Test-side Hoeffding half-width, two-sided, samples in [0, 1].
fn hoeffding(n: usize, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

/// ⟨ψ|ρ|ψ⟩ by explicit sums.
fn expect_pure(psi: &PureState, rho: &CMat) -> f64 {
    let a = psi.amplitudes();
    let mut s = qplab::qcore::C64::new(0.0, 0.0);
    for i in 0..a.len() {
        for j in 0..a.len() {
            s += a[i].conj() * rho[(i, j)] * a[j];
        }
    }
    s.re
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, format!("runtime {:.1?} over {:?}", t.elapsed(), limit))
}

fn q<T>(r: qplab::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn random_mixed(n: usize, rng: &mut QRng) -> qplab::Result<DensityMatrix> {
    let rank = rng.random_range(1..=(1usize << n));
    random_density(n, rank, rng)
}

fn c1_swap_test() -> Outcome {
    let t = Instant::now();
    let mut rng = rng_for(101, 0);
    let band = hoeffding(10_000, 1e-3);
    let mut worst_exact: f64 = 0.0;
    let mut worst_mc: f64 = 0.0;
    for i in 0..200 {
        let n = 1 + i % 3;
        let psi = q(haar_state(n, &mut rng))?;
        let rho = q(random_mixed(n, &mut rng))?;
        let want = 0.5 + 0.5 * expect_pure(&psi, rho.matrix());
        let dist = q(swap_test(&psi.density(), &rho))?;
        let p0 = dist.prob("0");
        worst_exact = worst_exact.max((p0 - want).abs());
        let idx = dist.outcomes.iter().position(|o| o.label == "0").ok_or("no outcome 0")?;
        let shots = sample_trajectory(&dist, 10_000, 1000 + i as u64);
        let freq = shots.iter().filter(|&&s| s == idx).count() as f64 / 1e4;
        worst_mc = worst_mc.max((freq - p0).abs());
    }
    ensure(worst_exact <= 1e-10, format!("exact deviation {worst_exact:e}"))?;
    ensure(worst_mc <= band, format!("Monte-Carlo deviation {worst_mc} over band {band}"))?;
    within(t, Duration::from_secs(10))?;
    Ok(format!("max |exact - law| {worst_exact:.1e}, max MC deviation {worst_mc:.4} <= {band:.4}, {:.1?}", t.elapsed()))
}

fn c2_quantum_or() -> Outcome {
    let t = Instant::now();
    let mut rng = rng_for(202, 0);
    let eta = 2.0 / 3.0;
    let (mut min_yes, mut max_no) = (f64::INFINITY, 0.0f64);
    for i in 0..100 {
        let (n_a, m) = [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3)][i % 5];
        let delta = 1.0 / (64.0 * (1u64 << m) as f64);
        if i < 50 {
            let (rho, inst) = q(gen_yes(n_a, m, eta, &mut rng))?;
            min_yes = min_yes.min(q(qor_accept_exact(&rho, &inst, eta))?.0);
        } else {
            let (rho, inst) = q(gen_no(n_a, m, delta, &mut rng))?;
            max_no = max_no.max(q(qor_accept_exact(&rho, &inst, eta))?.0);
        }
    }
    ensure(min_yes >= 4.0 / 63.0, format!("yes acceptance {min_yes} below 4/63"))?;
    ensure(max_no <= 1.0 / 16.0, format!("no acceptance {max_no} above 1/16"))?;
    within(t, Duration::from_secs(120))?;
    Ok(format!("min yes {min_yes:.4} >= 4/63, max no {max_no:.2e} <= 1/16, {:.1?}", t.elapsed()))
}

struct ClockCase {
    layout: ClockLayout,
    inst: HamiltonianInstance,
    psi: PureState,
    /// History state (yes) or ground state (no).
    witness: PureState,
    yes: bool,
}

fn layout_for(i: usize) -> ClockLayout {
    let m = 1 + i % 3;
    let n = if m == 3 { 2 } else { 1 };
    ClockLayout { n, copies: 1, n_witness: 1, n_anc: 1, m }
}

/// η†Hη from the assembled matrix.
fn energy(inst: &HamiltonianInstance, psi: &PureState, eta: &PureState) -> qplab::Result<f64> {
    let h = inst.assemble(psi)?;
    let v = eta.amplitudes();
    Ok((v.adjoint() * h.matrix() * v)[(0, 0)].re)
}

fn clock_cases() -> qplab::Result<Vec<ClockCase>> {
    let mut rng = rng_for(303, 0);
    let mut out = Vec::new();
    for i in 0..40 {
        let yes = i < 20;
        let l = layout_for(i);
        let v = random_verifier(l, yes, &mut rng)?;
        let ci = cook_levin(&v, l, DEFAULT_PENALTY, BSource::Reference)?;
        let psi = haar_state(l.n, &mut rng)?;
        let witness = if yes {
            history_state(&v, l, &psi, &haar_state(l.n_witness, &mut rng)?)?
        } else {
            min_eigenpair(&ci.instance.assemble(&psi)?)?.1
        };
        out.push(ClockCase { layout: l, inst: ci.instance, psi, witness, yes });
    }
    Ok(out)
}

fn c3_cook_levin(cases: &[ClockCase]) -> Outcome {
    let t = Instant::now();
    let mut worst_yes = f64::NEG_INFINITY;
    let mut worst_no = f64::INFINITY;
    for c in cases {
        let i = &c.inst;
        ensure(i.b - i.a > 2.0 / i.p as f64, format!("b - a = {} not above 2/p = {}", i.b - i.a, 2.0 / i.p as f64))?;
        let a_want = 1.0 / ((1u64 << (c.layout.n + 1)) as f64 * (c.layout.m + 1) as f64);
        ensure((i.a - a_want).abs() < 1e-12, format!("a = {} but 1/(2^(n+1)(m+1)) = {a_want}", i.a))?;
        if c.yes {
            let e = q(energy(i, &c.psi, &c.witness))?;
            worst_yes = worst_yes.max(e - i.a);
        } else {
            let lmin = q(energy(i, &c.psi, &c.witness))?;
            worst_no = worst_no.min(lmin - i.b);
        }
    }
    ensure(worst_yes <= 0.0, format!("history energy exceeds a by {worst_yes:e}"))?;
    ensure(worst_no >= -1e-9, format!("lambda_min below b by {:e}", -worst_no))?;
    within(t, Duration::from_secs(300))?;
    Ok(format!("max (E_hist - a) {worst_yes:.2e}, min (lambda_min - b) {worst_no:.2e}, b - a > 2/p on all 40, {:.1?}", t.elapsed()))
}

fn c4_lhwp(cases: &[ClockCase]) -> Outcome {
    let mut rng = rng_for(404, 0);
    let mut worst: f64 = 0.0;
    for c in cases.iter().filter(|c| c.yes) {
        let budget = (c.inst.plain_terms.len() + c.inst.coupled_terms.len()) as f64;
        let random = q(haar_state(c.inst.n_total_qubits, &mut rng))?;
        for eta in [&c.witness, &random] {
            let r = q(lhwp_exact(&c.inst, &c.psi, Witness::Pure(eta)))?;
            let e = r.stat("round_expectation").ok_or("missing round expectation")?;
            worst = worst.max((e - q(energy(&c.inst, &c.psi, eta))? / budget).abs());
        }
        ensure(pure_budget(&c.inst) as f64 == budget, "term budget")?;
    }
    ensure(worst <= 1e-8, format!("estimator bias {worst:e}"))?;
    let (mut yes, mut no, mut ny, mut nn) = (0.0, 0.0, 0, 0);
    for (k, c) in cases.iter().enumerate() {
        let rate = q(lhwp_accept_rate(&c.inst, &c.psi, Witness::Pure(&c.witness), 400, 40, 4000 + k as u64))?;
        if c.yes {
            yes += rate;
            ny += 1;
        } else {
            no += rate;
            nn += 1;
        }
    }
    let (yes, no) = (yes / ny as f64, no / nn as f64);
    ensure(yes - no >= 0.3, format!("sampled gap {:.3} (yes {yes:.3}, no {no:.3})", yes - no))?;
    Ok(format!("max |E[round] - <H>/(|S|+|L|)| {worst:.1e}, sampled accept yes {yes:.3} no {no:.3} gap {:.3}", yes - no))
}

fn p0() -> CMat {
    CMat::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(0.0)])
}

fn c5_lhwm() -> Outcome {
    let mut rng = rng_for(505, 0);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for i in 0..10 {
        let m = 1 + i % 2;
        let l = ClockLayout { n: 1, copies: 1, n_witness: 1, n_anc: 1, m };
        let v = q(random_verifier(l, true, &mut rng))?;
        let ci = q(cook_levin_variant(&v, l, DEFAULT_PENALTY, BSource::Reference, Variant::Mixed))?;
        let c = q(honest_history_circuit(&v, l))?;
        let phi = q(haar_state(1, &mut rng))?;
        let rho = q(random_density(1, 2, &mut rng))?;
        let alpha = 1.0 / ((m + 1) as f64).sqrt();
        let w = LhwmWitness { circuit: &c, phi: &phi, alpha };
        let inst = &ci.instance;
        for (li, term) in inst.coupled_terms.iter().enumerate() {
            let n_eig = term.eigen().0.len();
            for r in 0..n_eig {
                let wl = q(w_l_expectation(inst, &rho, 1, w, li, r))?;
                let target = q(step2_l_target(inst, &rho, 1, w, li, r))?;
                worst = worst.max((wl - target).abs());
                checked += 1;
            }
        }
    }
    ensure(worst <= 1e-8, format!("W_L vs target {worst:e}"))?;
    // H_ℓ = |0⟩⟨0| on E with C = I makes X ≡ 1.
    let inst = HamiltonianInstance {
        n_total_qubits: 3,
        plain_terms: vec![LocalTerm::new(vec![1], p0()).map_err(|e| e.to_string())?],
        coupled_terms: vec![LocalTerm::new(vec![2], p0()).map_err(|e| e.to_string())?],
        input_register: (0, 1),
        p: 40,
        a: 0.1,
        b: 0.5,
        variant: Variant::Mixed,
    };
    let c = GateCircuit::new(3);
    let phi = PureState::zero(1);
    let cfg = LhwmConfig { rounds: 60, block: 200, ..LhwmConfig::default() };
    let mut fired = 0;
    let mut runs = 0;
    for k in 0..5 {
        let rho = q(random_density(1, 2, &mut rng))?;
        for alpha in [0.5, 0.25, 0.0, -0.5, -1.0] {
            let w = LhwmWitness { circuit: &c, phi: &phi, alpha };
            let ex = q(lhwm_exact(&inst, &rho, 1, w, &cfg))?;
            runs += 1;
            if ex.stat("aborting_choices") == Some(1.0) && !ex.verdict.is_accept() {
                fired += 1;
            }
            for seed in 0..4 {
                let s = q(lhwm_verify(&inst, &rho, 1, w, &cfg, 100 * k + seed))?;
                runs += 1;
                if s.stat("aborted") == Some(1.0) && !s.verdict.is_accept() {
                    fired += 1;
                }
            }
        }
    }
    ensure(fired == runs, format!("abort fired in {fired}/{runs} runs"))?;
    Ok(format!("{checked} (l, r) pairs: max |E[W_L] - target| {worst:.1e}; abort fired {fired}/{runs}"))
}

/// Rank-(d−1) projector I − |w⟩⟨w| with w mostly outside supp ρ.
fn near_certain(u: &CMat, rank: usize, tilt: f64, rng: &mut QRng) -> CMat {
    let d = u.nrows();
    let mut coeff = CVec::from_fn(d, |_, _| qplab::qcore::C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    for j in 0..rank {
        coeff[j] *= cr(tilt);
    }
    let w = u * coeff;
    let w = &w / cr(w.norm());
    CMat::identity(d, d) - &w * w.adjoint()
}

fn c6_union_bound() -> Outcome {
    let mut rng = rng_for(606, 0);
    let (mut slack_acc, mut slack_td) = (f64::INFINITY, f64::INFINITY);
    for i in 0..100 {
        let n = 1 + i % 3;
        let d = 1usize << n;
        let u = q(haar_unitary(n, &mut rng))?;
        let rank = rng.random_range(1..=d.max(2) / 2);
        let probs: Vec<f64> = {
            let w: Vec<f64> = (0..rank).map(|_| rng.random::<f64>() + 0.1).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        };
        let mut diag = CMat::zeros(d, d);
        for (j, p) in probs.iter().enumerate() {
            diag[(j, j)] = cr(*p);
        }
        let rho = q(DensityMatrix::new(n, &u * diag * u.adjoint()))?;
        let count = rng.random_range(1..=6);
        let tilt = 0.05 + 0.2 * rng.random::<f64>();
        let tests: Vec<CMat> = (0..count).map(|_| near_certain(&u, rank, tilt, &mut rng)).collect();
        let r = q(sequential_measure(&rho, &tests))?;
        let sum: f64 = tests.iter().map(|e| 1.0 - rho.expectation(e)).sum();
        slack_acc = slack_acc.min(r.accept_prob - (1.0 - 4.0 * sum));
        let post = r.post.ok_or("post state unreachable")?;
        slack_td = slack_td.min(sum.sqrt() - q(trace_distance(&post, &rho))?);
    }
    ensure(slack_acc >= -1e-10, format!("accept below 1 - 4 sum eps by {:e}", -slack_acc))?;
    ensure(slack_td >= -1e-10, format!("TD above sqrt(sum eps) by {:e}", -slack_td))?;
    Ok(format!("min accept slack {slack_acc:.2e}, min TD slack {slack_td:.2e} over 100 sequences"))
}

/// Best acceptance over completions of a `len`-bit prefix.
fn best_completion(table: &[f64], prefix: usize, len: usize) -> f64 {
    let mask = (1usize << len) - 1;
    table.iter().enumerate().filter(|(w, _)| w & mask == prefix).map(|(_, p)| *p).fold(f64::NEG_INFINITY, f64::max)
}

fn c7_search_to_decision() -> Outcome {
    let (a, slack) = (0.8, 0.3);
    let bits = 6;
    let mut ok = 0;
    let mut good_fail = 0;
    for trial in 0..200u64 {
        let mut rng = rng_for(707, trial);
        let mut table: Vec<f64> = (0..1 << bits).map(|_| rng.random::<f64>()).collect();
        let g = rng.random_range(0..table.len());
        table[g] = a + (1.0 - a) * rng.random::<f64>();
        let v = q(bernoulli_verifier(&table))?;
        let mut oracle = q(PrefixOracle::from_verifier(&v, &PureState::zero(0), a, slack, DontCare::random(trial)))?;
        let step = oracle.step();
        let r = q(search_to_decision(&mut oracle))?;
        let accept = q(v.accept_classical(&PureState::zero(0), r.witness))?;
        if accept >= a - slack {
            ok += 1;
        }
        for len in 0..=bits {
            let prefix = r.witness & ((1usize << len) - 1);
            let good = best_completion(&table, prefix, len) >= a - (len + 1) as f64 * step;
            if !good || r.good[len] != good {
                good_fail += 1;
            }
        }
    }
    ensure(ok as f64 >= 0.95 * 200.0, format!("{ok}/200 witnesses above a - slack"))?;
    ensure(good_fail == 0, format!("{good_fail} prefix steps outside Good"))?;
    Ok(format!("{ok}/200 witnesses accepted with p >= a - slack, every prefix in Good by brute force"))
}

/// P[Bin(t, ½) ≥ ⌈5t/8⌉] from statrs.
fn bin_tail(t: usize) -> f64 {
    let k = (5 * t).div_ceil(8) as u64;
    let b = Binomial::new(0.5, t as u64).expect("binomial");
    if k == 0 {
        1.0
    } else {
        b.sf(k - 1)
    }
}

fn schmidt(theta: f64) -> PureState {
    let mut v = CVec::zeros(4);
    v[0] = cr(theta.cos());
    v[3] = cr(theta.sin());
    PureState::new(2, v).expect("normalized")
}

fn diag1(p: f64) -> DensityMatrix {
    DensityMatrix::new(1, CMat::from_row_slice(2, 2, &[cr(p), cr(0.0), cr(0.0), cr(1.0 - p)])).expect("density")
}

fn c8_protocols() -> Outcome {
    let mixed = DensityMatrix::maximally_mixed(1);
    let mut worst: f64 = 0.0;
    for t in 1..=40 {
        worst = worst.max((q(mixedness_accept_exact(&mixed, t, &ProverStrategy::honest()))? - bin_tail(t)).abs());
    }
    let p16 = q(mixedness_accept_exact(&mixed, 16, &ProverStrategy::honest()))?;
    ensure(worst < 1e-12, format!("mixedness tail deviation {worst:e}"))?;
    ensure(format!("{p16:.6}") == "0.227249", format!("t = 16 gives {p16}"))?;

    let complete = q(maxent_round_pass(&PureState::epr(1), &ProverStrategy::honest()))?;
    ensure((complete - 1.0).abs() < 1e-12, format!("maxent completeness {complete}"))?;
    let mut rng = rng_for(808, 0);
    let mut worst_pass: f64 = 0.0;
    let base = schmidt(0.5 * 0.5f64.asin());
    for i in 0..20 {
        // Local unitaries keep the distance to the maximally entangled set.
        let phi = if i == 0 {
            base.clone()
        } else {
            let u = q(haar_unitary(1, &mut rng))?;
            let w = q(haar_unitary(1, &mut rng))?;
            q(q(base.apply(&u, &[0]))?.apply(&w, &[1]))?
        };
        let f = q(fidelity(&q(phi.reduced(&[1]))?, &mixed))?;
        ensure(((1.0 - f * f).sqrt() - 0.5).abs() < 1e-9, "input not at distance 1/2")?;
        for p in [ProverStrategy::honest(), ProverStrategy::best_response(), ProverStrategy::identity()] {
            worst_pass = worst_pass.max(q(maxent_round_pass(&phi, &p))?);
        }
    }
    ensure(worst_pass <= 7.0 / 8.0 + 1e-9, format!("maxent no-case pass {worst_pass}"))?;

    let inst = q(QsdInstance::new(PureState::zero(1), GateCircuit::new(1), GateCircuit::new(1).with(GateKind::X, &[0]), vec![0]))?;
    let pair = q(Purified::from_instance(&inst))?;
    let cheat = q(optimal_cheat(&q(pair.sigma(0))?, &q(pair.sigma(1))?, 3))?;
    let best = q(public_coin_accept_exact(&inst, &ProverStrategy::best_response(), None))?;
    ensure((cheat.value - 0.75).abs() < 1e-8, format!("optimal cheat {}", cheat.value))?;
    ensure((best - 0.75).abs() < 1e-8, format!("best-response public coin {best}"))?;

    let efi = q(EfiPair::new(diag1(0.95), diag1(0.05)))?;
    let mut worst_efi: f64 = 0.0;
    for t in 1..=10 {
        for p in [ProverStrategy::honest(), ProverStrategy::constant(true), ProverStrategy::constant(false)] {
            let acc = q(efi_accept_exact(&efi, &efi.rho0, &efi.rho0, t, &p))?;
            worst_efi = worst_efi.max((acc - 0.5f64.powi(t as i32)).abs());
        }
    }
    ensure(worst_efi < 1e-12, format!("EFI no-case deviation {worst_efi:e}"))?;
    Ok(format!(
        "mixedness t=16 {p16:.6} (tail dev {worst:.0e}), maxent completeness 1, no-case pass {worst_pass:.6} <= 7/8, public-coin cheat {:.9}, EFI no-case dev {worst_efi:.0e}",
        cheat.value
    ))
}

fn c9_crypto() -> Outcome {
    let mut hiding: f64 = 0.0;
    for i in 0..50 {
        let (lambda, k) = (1 + i % 3, 1 + (i / 3) % 2);
        hiding = hiding.max(q(hiding_check(&q(CommitmentSession::haar(lambda, k, 900 + i as u64))?))?);
    }
    ensure(hiding <= 1e-10, format!("hiding TD {hiding:e}"))?;
    let mut rng = rng_for(909, 0);
    let mut half: f64 = 0.0;
    for i in 0..60 {
        let lambda = 1 + i % 3;
        let t1 = q(haar_unitary(lambda, &mut rng))?;
        let t2 = q(haar_unitary(lambda, &mut rng))?;
        let u = q(haar_unitary(lambda, &mut rng))?;
        let h = q(half_state(lambda, &t1, &t2))?;
        let v = q(qplab::crypto::flip_value(&PureState::epr(lambda), &h, 1, &u, &PureState::zero(0)))?;
        half = half.max(v * v);
    }
    ensure(half <= 0.75 + 1e-8, format!("HALF-state per-copy squared fidelity {half}"))?;
    let prs = q(prs_experiment(&q(PrsScheme::keyed(4, 4, 4, 910))?, 1000, 1, 911))?;
    ensure(prs.advantage >= 0.5, format!("PRS advantage {}", prs.advantage))?;
    let owsg = q(OwsgScheme::new(q(PrsScheme::keyed(6, 6, 3, 912))?, 1))?;
    let rows = q(owsg_experiment(&owsg, &OwsgAttack { shots: Some(64), ..OwsgAttack::default() }, 200, 913))?;
    let wins = rows.iter().filter(|r| r.success).count();
    ensure(wins as f64 >= 0.95 * 200.0, format!("OWSG recovered {wins}/200"))?;
    Ok(format!(
        "hiding TD {hiding:.1e}, HALF max F^2 {half:.4} <= 3/4, PRS advantage {:.3}, OWSG {wins}/200",
        prs.advantage
    ))
}

fn c10_metrics() -> Outcome {
    let tol = 1e-8;
    let mut rng = rng_for(1010, 0);
    let mut fails = Vec::new();
    let mut tri = 0;
    let mut fvdg = 0;
    let mut mono = 0;
    let mut ineq = 0;
    let mut amp = 0;
    for i in 0..500 {
        let n = 1 + i % 3;
        let a = q(random_mixed(n, &mut rng))?;
        let b = q(random_mixed(n, &mut rng))?;
        let c = q(random_mixed(n, &mut rng))?;
        let (ab, bc, ac) = (q(trace_distance(&a, &b))?, q(trace_distance(&b, &c))?, q(trace_distance(&a, &c))?);
        if ac > ab + bc + tol {
            tri += 1;
        }
        let f = q(fidelity(&a, &b))?;
        if 1.0 - f > ab + tol || ab > (1.0 - f * f).max(0.0).sqrt() + tol {
            fvdg += 1;
        }
        let (fbc, fac) = (q(fidelity(&b, &c))?, q(fidelity(&a, &c))?);
        if f * f + fbc * fbc > 1.0 + fac + tol {
            ineq += 1;
        }
        let x = q(random_mixed(2, &mut rng))?;
        let y = q(random_mixed(2, &mut rng))?;
        let keep = [i % 2];
        if q(fidelity(&q(x.partial_trace(&keep))?, &q(y.partial_trace(&keep))?))? < q(fidelity(&x, &y))? - tol {
            mono += 1;
        }
        let n1 = if i % 5 == 0 { 2 } else { 1 };
        let r = q(random_mixed(n1, &mut rng))?;
        let s = q(random_mixed(n1, &mut rng))?;
        let eps = q(trace_distance(&r, &s))?;
        let (mut rl, mut sl) = (r.clone(), s.clone());
        let max_l = if n1 == 1 { 6 } else { 4 };
        for l in 1..=max_l {
            if l > 1 {
                rl = rl.tensor(&r);
                sl = sl.tensor(&s);
            }
            let tl = q(trace_distance(&rl, &sl))?;
            let lower = 1.0 - (-(l as f64) * eps * eps).exp();
            if !(lower < tl + tol) || tl > l as f64 * eps + tol {
                amp += 1;
            }
        }
    }
    for (name, count) in [("triangle", tri), ("Fuchs-van de Graaf", fvdg), ("monotonicity", mono), ("fidelity inequality", ineq), ("tensor power", amp)] {
        if count > 0 {
            fails.push(format!("{name}: {count} violations"));
        }
    }
    ensure(fails.is_empty(), fails.join(", "))?;
    Ok("triangle, Fuchs-van de Graaf, monotonicity, F^2 + F^2 <= 1 + F and tensor-power bounds hold on 500 instances each".into())
}

fn main() {
    let cases = clock_cases();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("swap-test law", Box::new(c1_swap_test)),
        ("quantum OR bounds", Box::new(c2_quantum_or)),
        ("Cook-Levin energy gap", Box::new(|| c3_cook_levin(cases.as_ref().map_err(|e| e.to_string())?))),
        ("LHwP unbiasedness and gap", Box::new(|| c4_lhwp(cases.as_ref().map_err(|e| e.to_string())?))),
        ("LHwM W_L term and abort rule", Box::new(c5_lhwm)),
        ("quantum union bound", Box::new(c6_union_bound)),
        ("search to decision", Box::new(c7_search_to_decision)),
        ("protocol numbers", Box::new(c8_protocols)),
        ("crypto games", Box::new(c9_crypto)),
        ("metric property suite", Box::new(c10_metrics)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
