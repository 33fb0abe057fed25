//! Golden-section minimization of a unimodal scalar function.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimum located by [`golden_section`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Minimizes `f` over `[lo, hi]` until the bracket is narrower than `tol`.
/// `f` is assumed unimodal on the interval.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Minimum {
    debug_assert!(lo < hi && tol > 0.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iterations = 0;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let x = 0.5 * (a + b);
    let value = f(x);
    // the midpoint can be marginally worse than the best probe
    let (x, value) = [(x, value), (c, fc), (d, fd)]
        .into_iter()
        .fold(
            (x, value),
            |best, cand| if cand.1 < best.1 { cand } else { best },
        );
    Minimum {
        x,
        value,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic() {
        let m = golden_section(|x| (x - 1.3) * (x - 1.3) + 2.0, 0.0, 5.0, 1e-8);
        assert!((m.x - 1.3).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn monotone_goes_to_boundary() {
        let m = golden_section(|x| x, 0.05, 10.0, 1e-6);
        assert!((m.x - 0.05).abs() < 1e-6);
    }
}
