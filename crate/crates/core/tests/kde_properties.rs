use egfkit::distributions::{DistributionSpec, Sample};
use egfkit::kde::{self, BaseKernel, BandwidthRule, Kde, KdeConfig, KernelComponent, KernelSpec};
use egfkit::numerics::{integrate, Interval, RngStream};
use proptest::prelude::*;

fn mixtures() -> Vec<KernelSpec> {
    let mut out: Vec<KernelSpec> = [
        BaseKernel::Gaussian,
        BaseKernel::Epanechnikov,
        BaseKernel::Triangular,
        BaseKernel::Uniform,
    ]
    .into_iter()
    .map(KernelSpec::single)
    .collect();
    out.push("0.5:gaussian,0.5:epanechnikov".parse().unwrap());
    out.push("0.2:uniform,0.3:triangular,0.5:gaussian".parse().unwrap());
    out.push(
        KernelSpec::new(vec![
            KernelComponent { weight: 0.25, base: BaseKernel::Epanechnikov },
            KernelComponent { weight: 0.75, base: BaseKernel::Uniform },
        ])
        .unwrap(),
    );
    out
}

fn draw(d: &DistributionSpec, n: usize, stream: u64) -> Sample {
    d.sample(n, &mut RngStream::new(77, stream)).unwrap()
}

#[test]
fn every_mixture_integrates_to_one() {
    let sample = Sample::new(vec![-1.3, 0.0, 0.2, 0.25, 2.0, 4.5]).unwrap();
    for kernel in mixtures() {
        let config = KdeConfig::fixed(kernel.clone(), 0.7);
        let fit = Kde::fit(&config, &sample).unwrap();
        // Split at every kink of the compact kernels.
        let mut knots: Vec<f64> = sample
            .values()
            .iter()
            .flat_map(|&x| [x - 0.7, x, x + 0.7])
            .collect();
        knots.sort_by(f64::total_cmp);
        let (lo, hi) = (knots[0] - 10.0, knots[knots.len() - 1] + 10.0);
        let mut edges = vec![lo];
        edges.extend(knots);
        edges.push(hi);
        let mut total = 0.0;
        for w in edges.windows(2) {
            if w[1] > w[0] {
                total += integrate(|x| fit.eval(x), Interval::new(w[0], w[1]).unwrap(), 1e-12).unwrap();
            }
        }
        assert!((total - 1.0).abs() < 1e-6, "{kernel:?}: {total}");
    }
}

#[test]
fn mixture_is_convex_combination_of_components() {
    let sample = draw(&DistributionSpec::exponential(1.0).unwrap(), 200, 1);
    for kernel in mixtures() {
        let mixed = KdeConfig::fixed(kernel.clone(), 0.3);
        for x in [0.0, 0.1, 0.7, 2.0, 5.0] {
            let whole = kde::kde_eval(&mixed, &sample, x).unwrap();
            let parts: f64 = kernel
                .components
                .iter()
                .map(|c| c.weight * kde::kde_eval(&KdeConfig::fixed(KernelSpec::single(c.base), 0.3), &sample, x).unwrap())
                .sum();
            assert!((whole - parts).abs() <= 1e-12 * whole.max(1.0), "{kernel:?} x={x}");
        }
    }
}

#[test]
fn mise_decreases_with_sample_size() {
    let d = DistributionSpec::exponential(1.0).unwrap();
    let grid: Vec<f64> = (0..=200).map(|k| 0.025 * k as f64).collect();
    let config = KdeConfig::default();
    let mise: Vec<f64> = [100usize, 1000, 10_000]
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let s = draw(&d, n, 10 + k as u64);
            let fit = Kde::fit(&config, &s).unwrap();
            grid.iter().map(|&x| (fit.eval(x) - d.pdf(x)).powi(2)).sum::<f64>() * 0.025
        })
        .collect();
    assert!(mise[0] > mise[1] && mise[1] > mise[2], "{mise:?}");
}

#[test]
fn quadratic_functional_of_exponential() {
    let d = DistributionSpec::exponential(1.0).unwrap();
    let s = draw(&d, 5000, 3);
    let h = s.std_dev() * 5000f64.powf(-2.0 / 7.0);
    let est = kde::d2_estimate(&KdeConfig::fixed(KernelSpec::default(), h), &s, |_| 1.0).unwrap();
    assert!((est - 0.5).abs() < 0.05, "{est}");
    let zero = kde::d2_estimate(&KdeConfig::fixed(KernelSpec::default(), h), &s, |_| 0.0).unwrap();
    assert_eq!(zero, 0.0);
}

#[test]
fn order_statistic_evaluation_matches_pointwise() {
    let s = draw(&DistributionSpec::pareto_i(1.5).unwrap(), 300, 4);
    let config: KdeConfig = KdeConfig {
        kernel: "0.5:gaussian,0.5:triangular".parse().unwrap(),
        bandwidth_rule: BandwidthRule::Silverman,
    };
    let fit = Kde::fit(&config, &s).unwrap();
    for (x, f) in s.sorted().iter().zip(fit.at_order_statistics()) {
        assert!((fit.eval(*x) - f).abs() <= 1e-12 * f.max(1.0));
    }
}

proptest! {
    #[test]
    fn reflection_symmetry(
        v in prop::collection::vec(-50f64..50.0, 2..40),
        x in -60f64..60.0,
        k in 0usize..7,
    ) {
        let kernel = mixtures()[k].clone();
        let s = Sample::new(v.clone()).unwrap();
        let r = Sample::new(v.iter().map(|y| -y).collect()).unwrap();
        for config in [KdeConfig::fixed(kernel.clone(), 1.3), KdeConfig { kernel, bandwidth_rule: BandwidthRule::Silverman }] {
            let (Ok(a), Ok(b)) = (kde::kde_eval(&config, &s, x), kde::kde_eval(&config, &r, -x)) else {
                continue;
            };
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn estimate_is_nonnegative(v in prop::collection::vec(0.5f64..30.0, 2..30), x in 0f64..40.0) {
        let s = Sample::new(v).unwrap();
        if let Ok(f) = kde::kde_eval(&KdeConfig::default(), &s, x) {
            prop_assert!(f >= 0.0);
        }
    }
}
