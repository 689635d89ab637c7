//! BPR volume-delay function `t(v) = t0 * (1 + alpha * (v / c)^beta)`.

use super::Link;

/// Congested travel time in minutes at `flow` PCE/hour.
pub fn bpr_time(link: &Link, flow: f64) -> f64 {
    link.free_flow_time * (1.0 + link.vdf_alpha * (flow / link.capacity).powf(link.vdf_beta))
}

/// `∫₀^flow t(s) ds`, the link's share of the Beckmann potential.
pub fn bpr_integral(link: &Link, flow: f64) -> f64 {
    let beta = link.vdf_beta;
    link.free_flow_time
        * (flow + link.vdf_alpha * flow.powf(beta + 1.0) / ((beta + 1.0) * link.capacity.powf(beta)))
}

pub fn bpr_derivative(link: &Link, flow: f64) -> f64 {
    let beta = link.vdf_beta;
    link.free_flow_time * link.vdf_alpha * beta * flow.powf(beta - 1.0) / link.capacity.powf(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn link(fft: f64, cap: f64) -> Link {
        Link::new(1, 2, 1.0, fft, cap)
    }

    #[test]
    fn zero_flow_is_free_flow() {
        assert_eq!(bpr_time(&link(10.0, 100.0), 0.0), 10.0);
    }

    #[test]
    fn at_and_above_capacity() {
        let l = link(10.0, 100.0);
        assert!((bpr_time(&l, 100.0) - 11.5).abs() < 1e-12);
        assert!((bpr_time(&l, 200.0) - 34.0).abs() < 1e-12);
    }

    #[test]
    fn integral_closed_form() {
        let l = link(10.0, 100.0);
        assert!((bpr_integral(&l, 100.0) - 1030.0).abs() < 1e-9);
        assert_eq!(bpr_integral(&l, 0.0), 0.0);
    }

    #[test]
    fn integral_matches_quadrature() {
        let l = link(7.0, 80.0).with_vdf(0.5, 3.0);
        let x = 120.0;
        let n = 20_000;
        let h = x / n as f64;
        // composite Simpson
        let mut s = bpr_time(&l, 0.0) + bpr_time(&l, x);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * bpr_time(&l, k as f64 * h);
        }
        let quad = s * h / 3.0;
        assert!((bpr_integral(&l, x) - quad).abs() < 1e-8 * quad);
    }

    proptest! {
        #[test]
        fn monotone_in_flow(
            fft in 0.1f64..60.0,
            cap in 1.0f64..5000.0,
            alpha in 0.0f64..2.0,
            beta in 1.0f64..6.0,
            a in 0.0f64..10_000.0,
            b in 0.0f64..10_000.0,
        ) {
            let l = link(fft, cap).with_vdf(alpha, beta);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(bpr_time(&l, lo) <= bpr_time(&l, hi));
        }
    }
}
