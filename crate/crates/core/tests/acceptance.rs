//! Acceptance suite: one test per shipping criterion. Each prints a
//! single PASS/FAIL line (run with `-- --nocapture` to see them on
//! success) and asserts, so `cargo test --test acceptance` is the gate.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use retraction_core::attention::{build_attention_rows, build_regression_dataset, WindowConfig};
use retraction_core::ingest::{gen_synthetic, PaperRecord, SynthConfig, YearMonth};
use retraction_core::linkage::{levenshtein, link_records, normalize_title, LinkConfig};
use retraction_core::matching::{
    compute_outcomes, find_controls, outcome1, outcome2, stratify, CorpusIndex, MatchedSet,
    MatchingConfig, TierSpec,
};
use retraction_core::sim::{sweep_delay, BeliefState, SimParams, Simulation, Topology};
use retraction_core::stats::{holm_adjust, kruskal_wallis, ols, special, welch_anova, welch_t};

fn report(criterion: &str, ok: bool, detail: &str) {
    println!("{} {criterion} — {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{criterion}: {detail}");
}

// ---------------------------------------------------------------- 1

#[test]
fn criterion_1_delay_effect() {
    let params = SimParams {
        n_agents: 100,
        topology: Topology::Complete,
        share_window: 200,
        retraction_delay: 0,
        max_steps: 10_000,
        n_replicates: 500,
        rng_seed: 0xF1D0,
        transmission_prob: 1.0,
    };
    let delays = [0u32, 50, 100, 200];
    let start = Instant::now();
    let result = sweep_delay(&params, &delays).unwrap();
    let elapsed = start.elapsed();

    let s = &result.summaries;
    let retracted_nondecreasing = s
        .windows(2)
        .all(|w| w[1].mean_retracted >= w[0].mean_retracted - 1e-12);
    let false_nonincreasing = s
        .windows(2)
        .all(|w| w[1].mean_false <= w[0].mean_false + 1e-12);
    let n = params.n_replicates as f64;
    let gap = s[3].mean_retracted - s[0].mean_retracted;
    let pooled_se = (s[0].sd_retracted.powi(2) / n + s[3].sd_retracted.powi(2) / n).sqrt();
    let in_time = elapsed.as_secs_f64() < 60.0;

    let ok = retracted_nondecreasing && false_nonincreasing && gap > 2.0 * pooled_se && in_time;
    report(
        "criterion 1 (delay effect)",
        ok,
        &format!(
            "mean retracted by delay {:?}, gap {gap:.4} vs 2*SE {:.6}, mean false {:?}, {:.1}s",
            s.iter().map(|d| (d.delay, d.mean_retracted)).collect::<Vec<_>>(),
            2.0 * pooled_se,
            s.iter().map(|d| d.mean_false).collect::<Vec<_>>(),
            elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------- 2

fn rank(state: BeliefState) -> u8 {
    match state {
        BeliefState::Neutral => 0,
        BeliefState::False => 1,
        BeliefState::Retracted => 2,
    }
}

#[test]
fn criterion_2_simulation_invariants() {
    let mut meta = ChaCha8Rng::seed_from_u64(0xC2C2);
    let runs = 10_000;
    let mut violations = Vec::new();

    for run in 0..runs {
        let n_agents = meta.gen_range(2usize..=20);
        let topology = match meta.gen_range(0..3) {
            0 => Topology::Complete,
            1 => Topology::Ring {
                k: meta.gen_range(1..=((n_agents - 1) / 2).max(1)),
            },
            _ => Topology::ErdosRenyi {
                p: meta.gen_range(0.3..0.9),
            },
        };
        let max_steps = meta.gen_range(1..=25);
        let params = SimParams {
            n_agents,
            topology,
            share_window: meta.gen_range(1..=5),
            retraction_delay: meta.gen_range(0..=max_steps.min(8)),
            max_steps,
            n_replicates: 1,
            rng_seed: meta.gen(),
            transmission_prob: if meta.gen_bool(0.5) {
                1.0
            } else {
                meta.gen_range(0.2..1.0)
            },
        };

        let mut sim = Simulation::new(&params).unwrap();
        let mut prev: Vec<BeliefState> = sim.states().to_vec();
        while sim.step_index() < params.max_steps && !sim.is_quiescent() {
            sim.step();
            let counts = sim.counts();
            if counts.n_neutral + counts.n_false + counts.n_retracted != n_agents {
                violations.push(format!("run {run}: count conservation broken"));
            }
            if sim
                .states()
                .iter()
                .zip(&prev)
                .any(|(now, before)| rank(*now) < rank(*before))
            {
                violations.push(format!("run {run}: backward state transition"));
            }
            if sim.step_index() <= params.retraction_delay && counts.n_retracted != 0 {
                violations.push(format!("run {run}: retracted agent before the delay"));
            }
            prev = sim.states().to_vec();
        }

        let first = Simulation::new(&params).unwrap().run_to_completion();
        let second = Simulation::new(&params).unwrap().run_to_completion();
        if first != second {
            violations.push(format!("run {run}: replay mismatch {first:?} vs {second:?}"));
        }
    }

    report(
        "criterion 2 (simulation invariants)",
        violations.is_empty(),
        &format!(
            "{runs} randomized runs, {} violations{}",
            violations.len(),
            violations.first().map(|v| format!(" (first: {v})")).unwrap_or_default()
        ),
    );
}

// ---------------------------------------------------------------- 3

/// Minimal valid record whose post-retraction total over horizon 5 is
/// exactly `post` (all of it one year after retraction).
fn paper_with_post(id: &str, retracted: bool, retraction_year: i32, post: u32) -> PaperRecord {
    PaperRecord {
        paper_id: id.into(),
        doi: None,
        title: id.into(),
        pub_year: retraction_year - 2,
        venue: "v".into(),
        discipline: "d".into(),
        retraction_date: if retracted {
            YearMonth::new(retraction_year, 6)
        } else {
            None
        },
        retraction_reason: None,
        n_authors: None,
        journal_rank: None,
        subject_area: None,
        citations_by_year: BTreeMap::from([(retraction_year + 1, post)]),
    }
}

#[test]
fn criterion_3_outcome_formulas() {
    // Expected values frozen from a 50-digit decimal computation of
    // mean(a - b) and mean(ln((a + 1e-5)/(b + 1e-5))).
    let fixture: [(u32, &[u32], f64, f64); 20] = [
        (0, &[0], 0.0, 0.0),
        (5, &[5], 0.0, 0.0),
        (0, &[7], -7.0, -13.458837042595949),
        (7, &[0], 7.0, 13.458837042595949),
        (1, &[2], -1.0, -0.693142180597445),
        (2, &[1], 1.0, 0.693142180597445),
        (10, &[3], 7.0, 1.2039704709976582),
        (3, &[10], -7.0, -1.2039704709976582),
        (100, &[1], 99.0, 4.605160286038086),
        (1, &[100], -99.0, -4.605160286038086),
        (42, &[17], 25.0, 0.9044559240872408),
        (250, &[249], 1.0, 0.004008021236896255),
        (6, &[600], -594.0, -4.60516853598948),
        (1000, &[0], 1000.0, 18.420680753952364),
        (9, &[1, 5, 9], 4.0, 0.9283338215037752),
        (0, &[0, 0, 4], -1.3333333333333333, -4.299740775362332),
        (25, &[30, 20], 0.0, 0.020410980593471177),
        (7, &[7, 7, 7, 7], 0.0, 0.0),
        (12, &[0, 1], 11.5, 8.2413652156311),
        (3, &[8, 2, 4, 19, 3], -4.2, -0.5417737701683615),
    ];

    let ry = 2010;
    let mut corpus = Vec::new();
    let mut sets = Vec::new();
    for (i, (post_r, posts_m, _, _)) in fixture.iter().enumerate() {
        let rid = format!("r{i:02}");
        corpus.push(paper_with_post(&rid, true, ry, *post_r));
        let mut control_ids = Vec::new();
        for (j, &post_m) in posts_m.iter().enumerate() {
            let cid = format!("m{i:02}-{j}");
            corpus.push(paper_with_post(&cid, false, ry, post_m));
            control_ids.push(cid);
        }
        sets.push(MatchedSet {
            retracted_id: rid,
            control_ids,
            retraction_year: ry,
        });
    }
    let index = CorpusIndex::build(&corpus);

    let mut worst = 0.0f64;
    let mut fixture_ok = true;
    for (set, (_, _, want1, want2)) in sets.iter().zip(&fixture) {
        let got1 = outcome1(set, &index, 5).unwrap();
        let got2 = outcome2(set, &index, 5, 1e-5).unwrap();
        worst = worst.max((got1 - want1).abs()).max((got2 - want2).abs());
        fixture_ok &= (got1 - want1).abs() <= 1e-9 && (got2 - want2).abs() <= 1e-9;
    }

    // Antisymmetry of outcome2 under role swap; exact zero on equal posts.
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let mut swap_ok = true;
    let mut zero_ok = true;
    for i in 0..1_000 {
        let a: u32 = rng.gen_range(0..=1000);
        let b: u32 = rng.gen_range(0..=1000);
        let corpus = [
            paper_with_post("x", true, ry, a),
            paper_with_post("y", true, ry, b),
        ];
        let index = CorpusIndex::build(&corpus);
        let fwd = MatchedSet {
            retracted_id: "x".into(),
            control_ids: vec!["y".into()],
            retraction_year: ry,
        };
        let rev = MatchedSet {
            retracted_id: "y".into(),
            control_ids: vec!["x".into()],
            retraction_year: ry,
        };
        let o_fwd = outcome2(&fwd, &index, 5, 1e-5).unwrap();
        let o_rev = outcome2(&rev, &index, 5, 1e-5).unwrap();
        swap_ok &= (o_fwd + o_rev).abs() <= 1e-9;
        if i % 7 == 0 {
            // force the equal-posts case regularly
            let eq = [
                paper_with_post("p", true, ry, a),
                paper_with_post("q", true, ry, a),
            ];
            let index = CorpusIndex::build(&eq);
            let set = MatchedSet {
                retracted_id: "p".into(),
                control_ids: vec!["q".into()],
                retraction_year: ry,
            };
            zero_ok &= outcome1(&set, &index, 5).unwrap() == 0.0
                && outcome2(&set, &index, 5, 1e-5).unwrap() == 0.0;
        }
    }

    report(
        "criterion 3 (outcome formulas)",
        fixture_ok && swap_ok && zero_ok,
        &format!(
            "20-pair fixture worst |err| {worst:.2e}, antisymmetry {}, exact zeros {}",
            if swap_ok { "holds" } else { "broken" },
            if zero_ok { "hold" } else { "broken" }
        ),
    );
}

// ---------------------------------------------------------------- 4

#[test]
fn criterion_4_matching_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
    let venues = ["alpha", "beta", "gamma"];
    let dress = |rng: &mut ChaCha8Rng, base: &str| -> String {
        // random case/padding noise that trim+casefold must undo
        match rng.gen_range(0..4) {
            0 => base.to_uppercase(),
            1 => format!(" {base}"),
            2 => format!("{} ", base[..1].to_uppercase() + &base[1..]),
            _ => base.to_string(),
        }
    };

    let mut corpus = Vec::new();
    for i in 0..400 {
        let pub_year = 2000 + rng.gen_range(0..3);
        let retracted = i % 5 == 0; // 80 retracted
        let retraction_year = pub_year + rng.gen_range(0..=3);
        let mut citations = BTreeMap::new();
        for year in pub_year..=pub_year + 8 {
            let c = rng.gen_range(0..4u32);
            if c > 0 {
                citations.insert(year, c);
            }
        }
        let venue_base = venues[rng.gen_range(0..venues.len())];
        let discipline_base = if rng.gen_bool(0.5) { "bio" } else { "soc" };
        corpus.push(PaperRecord {
            paper_id: format!("p{i:03}"),
            doi: None,
            title: format!("paper {i}"),
            pub_year,
            venue: dress(&mut rng, venue_base),
            discipline: dress(&mut rng, discipline_base),
            retraction_date: if retracted {
                YearMonth::new(retraction_year, 1 + rng.gen_range(0..12))
            } else {
                None
            },
            retraction_reason: None,
            n_authors: None,
            journal_rank: None,
            subject_area: None,
            citations_by_year: citations,
        });
    }

    // Brute-force oracle with its own normalization and window sum.
    let norm = |s: &str| s.trim().to_lowercase();
    let window_sum = |p: &PaperRecord, from: i32, to: i32| -> u64 {
        p.citations_by_year
            .iter()
            .filter(|(y, _)| (from..=to).contains(y))
            .map(|(_, c)| u64::from(*c))
            .sum()
    };

    let index = CorpusIndex::build(&corpus);
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    for paper in corpus.iter().filter(|p| p.is_retracted()) {
        checked += 1;
        let ry = paper.retraction_date.unwrap().year;
        let pre = window_sum(paper, paper.pub_year, ry);
        let expected: HashSet<String> = corpus
            .iter()
            .filter(|q| {
                !q.is_retracted()
                    && q.pub_year == paper.pub_year
                    && norm(&q.venue) == norm(&paper.venue)
                    && norm(&q.discipline) == norm(&paper.discipline)
                    && window_sum(q, paper.pub_year, ry) == pre
            })
            .map(|q| q.paper_id.clone())
            .collect();
        let got: HashSet<String> = match find_controls(paper, &index).unwrap() {
            None => HashSet::new(),
            Some(set) => set.control_ids.into_iter().collect(),
        };
        if got != expected {
            mismatches += 1;
        }
    }

    report(
        "criterion 4 (matching oracle)",
        mismatches == 0,
        &format!("{checked} retracted papers, {mismatches} set mismatches vs brute force"),
    );
}

// ---------------------------------------------------------------- 5

/// Welch t statistic written out independently of the library.
fn welch_stat(a: &[f64], b: &[f64]) -> f64 {
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let var = |s: &[f64]| {
        let m = mean(s);
        s.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (s.len() - 1) as f64
    };
    (mean(a) - mean(b)) / (var(a) / a.len() as f64 + var(b) / b.len() as f64).sqrt()
}

/// Midranks and the tie-corrected Kruskal-Wallis H, from scratch.
fn kw_stat(groups: &[Vec<f64>]) -> f64 {
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = pooled.len() as f64;
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let mut h = 0.0;
    let mut offset = 0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        h += r * r / g.len() as f64;
        offset += g.len();
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    h / (1.0 - tie_term / (n * n * n - n))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[test]
#[allow(clippy::approx_constant)] // the 3.14 in the KW fixture is data, not pi
fn criterion_5_stats_oracles() {
    // Welch t vs exhaustive permutation over C(10,5) = 252 splits.
    let a = [-0.65, 0.03, -1.69, -0.25, -0.07];
    let b = [-0.45, 0.09, 1.62, 0.5, 0.87];
    let pooled: Vec<f64> = a.iter().chain(&b).copied().collect();
    let t_obs = welch_stat(&a, &b).abs();
    let mut hits = 0usize;
    let splits = combinations(pooled.len(), a.len());
    for chosen in &splits {
        let ga: Vec<f64> = chosen.iter().map(|&i| pooled[i]).collect();
        let gb: Vec<f64> = (0..pooled.len())
            .filter(|i| !chosen.contains(i))
            .map(|i| pooled[i])
            .collect();
        if welch_stat(&ga, &gb).abs() >= t_obs - 1e-12 {
            hits += 1;
        }
    }
    let welch_perm_p = hits as f64 / splits.len() as f64;
    let welch_asym = welch_t(&a, &b).unwrap();
    let welch_ok = (welch_asym.p_value - welch_perm_p).abs() <= 0.02;

    // Kruskal-Wallis vs exhaustive permutation over 1680 assignments.
    let g1 = vec![0.0, 0.3, -0.27];
    let g2 = vec![0.01, 0.45, -0.09];
    let g3 = vec![1.86, 3.14, 1.31];
    let kw_pooled: Vec<f64> = [&g1, &g2, &g3].iter().flat_map(|g| g.iter().copied()).collect();
    let h_obs = kw_stat(&[g1.clone(), g2.clone(), g3.clone()]);
    let mut kw_hits = 0usize;
    let mut kw_total = 0usize;
    for first in combinations(9, 3) {
        let rest: Vec<usize> = (0..9).filter(|i| !first.contains(i)).collect();
        for second_sel in combinations(6, 3) {
            let second: Vec<usize> = second_sel.iter().map(|&i| rest[i]).collect();
            let third: Vec<f64> = rest
                .iter()
                .filter(|i| !second.contains(i))
                .map(|&i| kw_pooled[i])
                .collect();
            let h = kw_stat(&[
                first.iter().map(|&i| kw_pooled[i]).collect(),
                second.iter().map(|&i| kw_pooled[i]).collect(),
                third,
            ]);
            kw_total += 1;
            if h >= h_obs - 1e-12 {
                kw_hits += 1;
            }
        }
    }
    let kw_perm_p = kw_hits as f64 / kw_total as f64;
    let kw_asym = kruskal_wallis(&[g1, g2, g3]).unwrap();
    let kw_ok = (kw_asym.p_value - kw_perm_p).abs() <= 0.02;

    // Holm vs an independently written step-down on 50 random vectors.
    let mut rng = ChaCha8Rng::seed_from_u64(0xC5);
    let mut holm_ok = true;
    for _ in 0..50 {
        let m = rng.gen_range(1..=8);
        let p: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| p[i].total_cmp(&p[j]));
        let mut expected = vec![0.0; m];
        let mut running = 0.0f64;
        for (step, &idx) in order.iter().enumerate() {
            running = running.max(((m - step) as f64 * p[idx]).min(1.0));
            expected[idx] = running;
        }
        let got = holm_adjust(&p).unwrap();
        holm_ok &= got
            .iter()
            .zip(&expected)
            .all(|(g, e)| (g - e).abs() <= 1e-12);
    }

    // Normal CDF probe.
    let phi = special::normal_cdf(1.96);
    let phi_ok = (phi - 0.9750021).abs() <= 1e-6;

    // Two-group Welch ANOVA F equals t^2.
    let mut f_ok = true;
    let mut worst_f = 0.0f64;
    for _ in 0..200 {
        let na = rng.gen_range(2..=12);
        let nb = rng.gen_range(2..=12);
        let ga: Vec<f64> = (0..na).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let gb: Vec<f64> = (0..nb).map(|_| rng.gen_range(-1.0..5.0)).collect();
        let f = welch_anova(&[ga.clone(), gb.clone()]).unwrap().statistic;
        let t = welch_t(&ga, &gb).unwrap().statistic;
        worst_f = worst_f.max((f - t * t).abs());
        f_ok &= (f - t * t).abs() <= 1e-9;
    }

    let ok = welch_ok && kw_ok && holm_ok && phi_ok && f_ok;
    report(
        "criterion 5 (statistics oracles)",
        ok,
        &format!(
            "welch |{:.4}-{:.4}|, kw |{:.4}-{:.4}|, holm {}, phi(1.96)={:.7}, worst |F-t^2| {:.1e}",
            welch_asym.p_value,
            welch_perm_p,
            kw_asym.p_value,
            kw_perm_p,
            if holm_ok { "exact" } else { "broken" },
            phi,
            worst_f
        ),
    );
}

// ---------------------------------------------------------------- 6

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

#[test]
fn criterion_6_end_to_end_effect_recovery() {
    let start = Instant::now();
    let penalties = [1.0, 0.8, 0.5, 0.2];
    let synth = gen_synthetic(&SynthConfig {
        n_retracted: 2000,
        n_controls_per_cell: 5,
        tier_penalties: penalties,
        attention_beta: 0.2,
        rng_seed: 0xC6,
    })
    .unwrap();
    let report_out = compute_outcomes(&synth.corpus, &MatchingConfig::default()).unwrap();
    let spec = TierSpec::canonical();
    let strata = stratify(&report_out.rows, &spec);

    let mut means = Vec::new();
    let mut medians = Vec::new();
    for tier_rows in &strata {
        let o1: Vec<f64> = tier_rows.iter().map(|r| r.outcome1).collect();
        let mut o2: Vec<f64> = tier_rows.iter().map(|r| r.outcome2).collect();
        means.push(o1.iter().sum::<f64>() / o1.len() as f64);
        medians.push(median(&mut o2));
    }
    let means_decreasing = means[1] > means[2] && means[2] > means[3];
    let medians_ok = medians
        .iter()
        .zip(&penalties)
        .all(|(m, p)| (m - p.ln()).abs() <= 0.15);

    let o1_groups: Vec<Vec<f64>> = strata
        .iter()
        .map(|rows| rows.iter().map(|r| r.outcome1).collect())
        .collect();
    let o2_groups: Vec<Vec<f64>> = strata
        .iter()
        .map(|rows| rows.iter().map(|r| r.outcome2).collect())
        .collect();
    let anova_p = welch_anova(&o1_groups).unwrap().p_value;
    let kw_p = kruskal_wallis(&o2_groups).unwrap().p_value;
    let elapsed = start.elapsed();

    let ok = report_out.unmatched.is_empty()
        && means_decreasing
        && medians_ok
        && anova_p < 0.01
        && kw_p < 0.01
        && elapsed.as_secs_f64() < 120.0;
    report(
        "criterion 6 (end-to-end effect recovery)",
        ok,
        &format!(
            "tier o1 means {means:?}, o2 medians {medians:?} vs ln(penalty) {:?}, ANOVA p {anova_p:.2e}, KW p {kw_p:.2e}, {:.1}s",
            penalties.map(f64::ln),
            elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------- 7

fn pre_citation_coefficient(beta: f64, seed: u64) -> (f64, f64, f64) {
    let synth = gen_synthetic(&SynthConfig {
        n_retracted: 3000,
        n_controls_per_cell: 1,
        tier_penalties: [1.0, 0.8, 0.5, 0.2],
        attention_beta: beta,
        rng_seed: seed,
    })
    .unwrap();
    let rows =
        build_attention_rows(&synth.corpus, &synth.mentions, &WindowConfig::default()).unwrap();
    let dataset = build_regression_dataset(&rows).unwrap();
    let fit = ols(&dataset.y_mentions, &dataset.design).unwrap();
    let idx = dataset
        .column_names
        .iter()
        .position(|c| c == "pre_citations")
        .unwrap();
    (fit.coefficients[idx], fit.std_errors[idx], fit.t_values[idx])
}

#[test]
fn criterion_7_regression_recovery() {
    let (coef, se, _) = pre_citation_coefficient(0.2, 0xC7);
    let recovered = (coef - 0.2).abs() <= 3.0 * se;
    let (_, _, t_null) = pre_citation_coefficient(0.0, 0xC7 + 1);
    let null_ok = t_null.abs() < 3.0;

    report(
        "criterion 7 (regression recovery)",
        recovered && null_ok,
        &format!("beta 0.2: coefficient {coef:.4} (SE {se:.4}); beta 0: |t| = {:.2}", t_null.abs()),
    );
}

// ---------------------------------------------------------------- 8

/// Top-down memoized edit distance, structurally unlike the two-row DP.
fn lev_memo(a: &[char], b: &[char], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
    if i == a.len() {
        return b.len() - j;
    }
    if j == b.len() {
        return a.len() - i;
    }
    if let Some(&d) = memo.get(&(i, j)) {
        return d;
    }
    let d = if a[i] == b[j] {
        lev_memo(a, b, i + 1, j + 1, memo)
    } else {
        1 + lev_memo(a, b, i + 1, j, memo)
            .min(lev_memo(a, b, i, j + 1, memo))
            .min(lev_memo(a, b, i + 1, j + 1, memo))
    };
    memo.insert((i, j), d);
    d
}

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> String {
    (0..len).map(|_| char::from(b'a' + rng.gen_range(0..26u8))).collect()
}

#[test]
fn criterion_8_linkage() {
    // Levenshtein vs a memoized oracle on 10^4 random pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(0xC8);
    let alphabet = ['a', 'b', 'c', 'd', 'e', ' '];
    let mut lev_ok = true;
    for _ in 0..10_000 {
        let draw = |rng: &mut ChaCha8Rng| -> String {
            let len = rng.gen_range(0..=12);
            (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
        };
        let (s, t) = (draw(&mut rng), draw(&mut rng));
        let sc: Vec<char> = s.chars().collect();
        let tc: Vec<char> = t.chars().collect();
        let want = lev_memo(&sc, &tc, 0, 0, &mut HashMap::new());
        lev_ok &= levenshtein(&s, &t) == want;
    }

    let cowbell_raw = levenshtein("The cowbell", "The cow-bell");
    let cowbell_norm = levenshtein(
        &normalize_title("The cowbell"),
        &normalize_title("The cow-bell"),
    );
    let cowbell_ok = cowbell_raw == 1 && cowbell_norm == 0;

    // 500-record corpus: titles perturbed by <= 2 letter edits, 30% of
    // pairs without DOIs. Expect the identity mapping, exactly.
    let mut left = Vec::new();
    let mut right = Vec::new();
    for i in 0..500 {
        let title: String = (0..4)
            .map(|_| {
                let len = rng.gen_range(5..=8);
                random_word(&mut rng, len)
            })
            .collect::<Vec<_>>()
            .join(" ");
        let doi = (!rng.gen_bool(0.3)).then(|| format!("10.9999/item.{i}"));
        let pub_year = 2000 + i % 6;

        let mut perturbed: Vec<char> = title.chars().collect();
        for _ in 0..rng.gen_range(0..=2usize) {
            let pos = rng.gen_range(0..perturbed.len());
            match rng.gen_range(0..3) {
                0 => perturbed[pos] = char::from(b'a' + rng.gen_range(0..26u8)),
                1 => {
                    perturbed.remove(pos);
                }
                _ => perturbed.insert(pos, char::from(b'a' + rng.gen_range(0..26u8))),
            }
        }

        let record = |id: String, title: String| PaperRecord {
            paper_id: id,
            doi: doi.clone(),
            title,
            pub_year,
            venue: "v".into(),
            discipline: "d".into(),
            retraction_date: None,
            retraction_reason: None,
            n_authors: None,
            journal_rank: None,
            subject_area: None,
            citations_by_year: BTreeMap::new(),
        };
        left.push(record(format!("L{i:03}"), title.clone()));
        right.push(record(format!("R{i:03}"), perturbed.into_iter().collect()));
    }
    // Input order must not be what makes the assignment come out right.
    left.shuffle(&mut rng);
    right.shuffle(&mut rng);

    let result = link_records(&left, &right, &LinkConfig::default());
    let got: HashSet<(String, String)> = result
        .pairs
        .iter()
        .map(|p| (p.left_id.clone(), p.right_id.clone()))
        .collect();
    let want: HashSet<(String, String)> =
        (0..500).map(|i| (format!("L{i:03}"), format!("R{i:03}"))).collect();
    let precision_recall_ok =
        got == want && result.unmatched_left.is_empty() && result.unmatched_right.is_empty();

    report(
        "criterion 8 (linkage)",
        lev_ok && cowbell_ok && precision_recall_ok,
        &format!(
            "memo oracle {}, cowbell raw/norm {cowbell_raw}/{cowbell_norm}, 500-record linkage {} correct pairs",
            if lev_ok { "agrees on 10^4 pairs" } else { "diverges" },
            got.intersection(&want).count()
        ),
    );
}
