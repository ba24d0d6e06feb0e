use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal_io::{GroupLabel, StageTag};

#[derive(Debug, Clone, PartialEq)]
pub struct AnovaReport {
    pub f_group: f64,
    pub f_stage: f64,
    pub f_interaction: f64,
    pub p_group: f64,
    pub p_stage: f64,
    pub p_interaction: f64,
    pub df_group: usize,
    pub df_stage: usize,
    pub df_interaction: usize,
    pub df_error: usize,
    pub ss_group: f64,
    pub ss_stage: f64,
    pub ss_interaction: f64,
    pub ss_error: f64,
}

impl AnovaReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("effect,df,ss,f,p\n");
        for (name, df, ss, f, p) in [
            ("group", self.df_group, self.ss_group, self.f_group, self.p_group),
            ("stage", self.df_stage, self.ss_stage, self.f_stage, self.p_stage),
            (
                "interaction",
                self.df_interaction,
                self.ss_interaction,
                self.f_interaction,
                self.p_interaction,
            ),
        ] {
            out.push_str(&format!("{name},{df},{ss},{f},{p}\n"));
        }
        out.push_str(&format!("error,{},{},,\n", self.df_error, self.ss_error));
        out
    }
}

/// Upper tail P(F > f) of the F distribution with (d1, d2) degrees of freedom.
pub fn f_survival(f: f64, d1: f64, d2: f64) -> Result<f64> {
    if f.is_nan() {
        return Err(Error::InvalidArgument("F statistic is NaN".into()));
    }
    if f <= 0.0 {
        return Ok(1.0);
    }
    if f.is_infinite() {
        return Ok(0.0);
    }
    let dist = FisherSnedecor::new(d1, d2).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(dist.sf(f).clamp(0.0, 1.0))
}

fn effect(ss: f64, df: usize, ms_error: f64, df_error: usize) -> Result<(f64, f64)> {
    if df == 0 {
        return Ok((0.0, 1.0));
    }
    let ss = ss.max(0.0);
    let f = if ms_error > 0.0 {
        ss / df as f64 / ms_error
    } else if ss > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok((f, f_survival(f, df as f64, df_error as f64)?))
}

/// Fixed-effects two-way ANOVA with interaction, sequential (Type I) sums
/// of squares in the order group, stage, interaction. Only levels that occur
/// in the data enter the design; every occurring (group, stage) cell needs
/// at least two observations.
pub fn anova_two_way<T: Real>(values: &[T], groups: &[GroupLabel], stages: &[StageTag]) -> Result<AnovaReport> {
    let n = values.len();
    if groups.len() != n || stages.len() != n {
        return Err(Error::Dimension(format!(
            "{n} values, {} group tags, {} stage tags",
            groups.len(),
            stages.len()
        )));
    }
    let y: Vec<f64> = values.iter().map(|v| v.as_f64()).collect();
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::Range(format!("observation {i} is not finite")));
    }
    let g_levels: Vec<GroupLabel> = GroupLabel::ALL.into_iter().filter(|g| groups.contains(g)).collect();
    let s_levels: Vec<StageTag> = StageTag::ALL.into_iter().filter(|s| stages.contains(s)).collect();
    if g_levels.len() < 2 || s_levels.len() < 2 {
        return Err(Error::Design(format!(
            "need at least two groups and two stages, found {} and {}",
            g_levels.len(),
            s_levels.len()
        )));
    }
    let (a, b) = (g_levels.len(), s_levels.len());
    let g_pos = |g: GroupLabel| g_levels.iter().position(|&x| x == g).expect("level");
    let s_pos = |s: StageTag| s_levels.iter().position(|&x| x == s).expect("level");

    let mut count = vec![0usize; a * b];
    let mut sum = vec![0.0; a * b];
    for i in 0..n {
        let c = g_pos(groups[i]) * b + s_pos(stages[i]);
        count[c] += 1;
        sum[c] += y[i];
    }
    for gi in 0..a {
        for si in 0..b {
            if count[gi * b + si] < 2 {
                return Err(Error::Design(format!(
                    "cell ({}, {}) has {} observations, need >= 2",
                    g_levels[gi],
                    s_levels[si],
                    count[gi * b + si]
                )));
            }
        }
    }
    let cell_mean: Vec<f64> = sum.iter().zip(&count).map(|(s, &c)| s / c as f64).collect();
    let grand = y.iter().sum::<f64>() / n as f64;

    let ss_error: f64 = (0..n)
        .map(|i| (y[i] - cell_mean[g_pos(groups[i]) * b + s_pos(stages[i])]).powi(2))
        .sum();
    let ss_cells: f64 = (0..a * b).map(|c| count[c] as f64 * (cell_mean[c] - grand).powi(2)).sum();

    let mut ss_group = 0.0;
    for gi in 0..a {
        let nc: usize = (0..b).map(|si| count[gi * b + si]).sum();
        let s: f64 = (0..b).map(|si| sum[gi * b + si]).sum();
        ss_group += nc as f64 * (s / nc as f64 - grand).powi(2);
    }

    // additive model fitted on cell means weighted by cell counts
    let p = 1 + (a - 1) + (b - 1);
    let mut x = DMatrix::<f64>::zeros(a * b, p);
    let mut rhs = DVector::<f64>::zeros(a * b);
    for gi in 0..a {
        for si in 0..b {
            let c = gi * b + si;
            let w = (count[c] as f64).sqrt();
            x[(c, 0)] = w;
            if gi > 0 {
                x[(c, gi)] = w;
            }
            if si > 0 {
                x[(c, a - 1 + si)] = w;
            }
            rhs[c] = w * cell_mean[c];
        }
    }
    let beta = x
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::Design(format!("additive model solve failed: {e}")))?;
    let fitted = &x * beta;
    let ss_additive: f64 = (0..a * b)
        .map(|c| {
            let w = (count[c] as f64).sqrt();
            count[c] as f64 * (fitted[c] / w - grand).powi(2)
        })
        .sum();
    let ss_stage = (ss_additive - ss_group).max(0.0);
    let ss_interaction = (ss_cells - ss_additive).max(0.0);

    let (df_group, df_stage) = (a - 1, b - 1);
    let df_interaction = df_group * df_stage;
    let df_error = n - a * b;
    let ms_error = ss_error / df_error as f64;
    let (f_group, p_group) = effect(ss_group, df_group, ms_error, df_error)?;
    let (f_stage, p_stage) = effect(ss_stage, df_stage, ms_error, df_error)?;
    let (f_interaction, p_interaction) = effect(ss_interaction, df_interaction, ms_error, df_error)?;
    Ok(AnovaReport {
        f_group,
        f_stage,
        f_interaction,
        p_group,
        p_stage,
        p_interaction,
        df_group,
        df_stage,
        df_interaction,
        df_error,
        ss_group,
        ss_stage,
        ss_interaction,
        ss_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_distr::{Distribution, Normal};

    fn design(reps: usize, effect: impl Fn(usize, usize) -> f64, sigma: f64, seed: u64) -> (Vec<f64>, Vec<GroupLabel>, Vec<StageTag>) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, sigma).unwrap();
        let (mut y, mut g, mut s) = (Vec::new(), Vec::new(), Vec::new());
        for (gi, &gl) in GroupLabel::ALL.iter().enumerate() {
            for (si, &st) in StageTag::ALL.iter().enumerate() {
                for _ in 0..reps {
                    y.push(effect(gi, si) + noise.sample(&mut rng));
                    g.push(gl);
                    s.push(st);
                }
            }
        }
        (y, g, s)
    }

    #[test]
    fn f_distribution_reference_point() {
        let p = f_survival(3.35, 2.0, 27.0).unwrap();
        assert!((p - 0.05).abs() < 1e-3, "{p}");
        assert_eq!(f_survival(0.0, 2.0, 27.0).unwrap(), 1.0);
    }

    #[test]
    fn balanced_matches_textbook_sums() {
        let (y, g, s) = design(3, |gi, si| gi as f64 + 0.5 * si as f64, 1.0, 4);
        let r = anova_two_way(&y, &g, &s).unwrap();
        // balanced: marginal-mean formulas hold for every effect
        let grand = y.iter().sum::<f64>() / y.len() as f64;
        let marginal = |pick: &dyn Fn(usize) -> bool| {
            let v: Vec<f64> = (0..y.len()).filter(|&i| pick(i)).map(|i| y[i]).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        let ss_s: f64 = StageTag::ALL
            .iter()
            .map(|&st| 9.0 * (marginal(&|i| s[i] == st) - grand).powi(2))
            .sum();
        let ss_g: f64 = GroupLabel::ALL
            .iter()
            .map(|&gl| 12.0 * (marginal(&|i| g[i] == gl) - grand).powi(2))
            .sum();
        assert!((r.ss_stage - ss_s).abs() < 1e-9);
        assert!((r.ss_group - ss_g).abs() < 1e-9);
        let ss_t: f64 = y.iter().map(|v| (v - grand).powi(2)).sum();
        assert!((r.ss_group + r.ss_stage + r.ss_interaction + r.ss_error - ss_t).abs() < 1e-9);
        assert_eq!((r.df_group, r.df_stage, r.df_interaction, r.df_error), (2, 3, 6, 24));
    }

    #[test]
    fn strong_group_effect() {
        let (y, g, s) = design(5, |gi, _| [0.0, 5.0, 10.0][gi], 0.1, 1);
        let r = anova_two_way(&y, &g, &s).unwrap();
        assert!(r.p_group < 1e-6);
    }

    #[test]
    fn null_calibration() {
        let mut above = 0;
        for seed in 0..200 {
            let (y, g, s) = design(4, |_, _| 3.0, 1.0, seed);
            let r = anova_two_way(&y, &g, &s).unwrap();
            assert!((0.0..=1.0).contains(&r.p_group));
            above += usize::from(r.p_group > 0.5);
        }
        // about half of null p-values exceed 0.5
        assert!((70..=130).contains(&above), "{above}");
    }

    #[test]
    fn p_decreases_with_effect_size() {
        let mut last = 1.0;
        for step in 0..6 {
            let scale = step as f64 * 0.3;
            let (y, g, s) = design(4, |gi, _| scale * gi as f64, 1.0, 9);
            let p = anova_two_way(&y, &g, &s).unwrap().p_group;
            assert!(p <= last + 1e-15, "step {step}: {p} > {last}");
            last = p;
        }
    }

    #[test]
    fn unbalanced_fits_additive_model() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let (mut y, mut g, mut s) = design(3, |gi, si| gi as f64 * 2.0 + si as f64, 0.5, 3);
        for _ in 0..7 {
            y.push(rng.gen_range(0.0..6.0));
            g.push(GroupLabel::AD);
            s.push(StageTag::Recall);
        }
        let r = anova_two_way(&y, &g, &s).unwrap();
        let grand = y.iter().sum::<f64>() / y.len() as f64;
        let ss_t: f64 = y.iter().map(|v| (v - grand).powi(2)).sum();
        assert!((r.ss_group + r.ss_stage + r.ss_interaction + r.ss_error - ss_t).abs() < 1e-8);
        assert!(r.p_stage < 1e-6);
    }

    #[test]
    fn empty_cell_rejected() {
        let (mut y, mut g, mut s) = design(2, |_, _| 0.0, 1.0, 0);
        let keep: Vec<usize> = (0..y.len())
            .filter(|&i| !(g[i] == GroupLabel::HC && s[i] == StageTag::Recall))
            .collect();
        y = keep.iter().map(|&i| y[i]).collect();
        g = keep.iter().map(|&i| g[i]).collect();
        s = keep.iter().map(|&i| s[i]).collect();
        assert!(matches!(anova_two_way(&y, &g, &s), Err(Error::Design(_))));
    }
}
