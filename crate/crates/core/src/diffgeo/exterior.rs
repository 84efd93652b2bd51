use super::Backend;
use crate::dual::{seed_direction, Dual, Real};

/// A differential `k`-form on an open subset of ℝ^N, evaluable over any scalar
/// type so that it can be differentiated by either backend.
pub trait FormField: Sync {
    fn dim(&self) -> usize;
    fn degree(&self) -> usize;
    /// `θ_x(v₁, …, v_k)`; the vectors are constant (coordinate-coefficient) fields.
    fn eval<T: Real>(&self, x: &[T], vecs: &[Vec<T>]) -> T;
}

fn directional<F: FormField>(
    form: &F,
    x: &[f64],
    dir: &[f64],
    vecs: &[Vec<f64>],
    backend: Backend,
) -> f64 {
    match backend {
        Backend::Dual => {
            let xs = seed_direction(x, dir);
            let vs: Vec<Vec<Dual<f64>>> = vecs
                .iter()
                .map(|v| v.iter().map(|&c| Dual::constant(c)).collect())
                .collect();
            form.eval(&xs, &vs).eps
        }
        Backend::Fd { h, .. } => {
            let xp: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + h * d).collect();
            let xm: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a - h * d).collect();
            (form.eval(&xp, vecs) - form.eval(&xm, vecs)) / (2.0 * h)
        }
    }
}

/// `dθ(X₀, …, X_k) = Σ_i (−1)^i X_i θ(X₀, …, X̂_i, …, X_k)` for constant fields,
/// i.e. the exterior derivative without the `1/(k+1)` factor.
pub fn numeric_d<F: FormField>(form: &F, x: &[f64], vecs: &[Vec<f64>], backend: Backend) -> f64 {
    debug_assert_eq!(vecs.len(), form.degree() + 1);
    let mut s = 0.0;
    for i in 0..vecs.len() {
        let rest: Vec<Vec<f64>> = vecs
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| v.clone())
            .collect();
        let term = directional(form, x, &vecs[i], &rest, backend);
        s += if i % 2 == 0 { term } else { -term };
    }
    s
}

fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `sqrt(Σ_{i₀<…<i_k} dθ(e_{i₀}, …, e_{i_k})²)`.
pub fn d_norm<F: FormField>(form: &F, x: &[f64], backend: Backend) -> f64 {
    let n = form.dim();
    increasing_tuples(n, form.degree() + 1)
        .into_iter()
        .map(|idx| {
            let vecs: Vec<Vec<f64>> = idx
                .iter()
                .map(|&i| {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    e
                })
                .collect();
            let v = numeric_d(form, x, &vecs, backend);
            v * v
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `dx_a ∧ dx_b` scaled by a function of x.
    struct Scaled2Form {
        n: usize,
        a: usize,
        b: usize,
        mode: u8,
    }

    impl FormField for Scaled2Form {
        fn dim(&self) -> usize {
            self.n
        }
        fn degree(&self) -> usize {
            2
        }
        fn eval<T: Real>(&self, x: &[T], v: &[Vec<T>]) -> T {
            let wedge = v[0][self.a] * v[1][self.b] - v[1][self.a] * v[0][self.b];
            let f = match self.mode {
                0 => T::one(),
                _ => (T::one() + x.iter().fold(T::zero(), |s, &c| s + c * c)).recip(),
            };
            f * wedge
        }
    }

    /// `x₁ dx₂`
    struct OneForm;

    impl FormField for OneForm {
        fn dim(&self) -> usize {
            3
        }
        fn degree(&self) -> usize {
            1
        }
        fn eval<T: Real>(&self, x: &[T], v: &[Vec<T>]) -> T {
            x[0] * v[0][1]
        }
    }

    fn e(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn d_of_constant_two_form_vanishes() {
        let w = Scaled2Form {
            n: 4,
            a: 0,
            b: 1,
            mode: 0,
        };
        assert_eq!(d_norm(&w, &[0.3, 0.2, 0.1, 0.0], Backend::Dual), 0.0);
    }

    #[test]
    fn d_of_x1_dx2() {
        let x = [0.7, -0.1, 0.4];
        assert_eq!(
            numeric_d(&OneForm, &x, &[e(3, 0), e(3, 1)], Backend::Dual),
            1.0
        );
        assert!(
            (numeric_d(&OneForm, &x, &[e(3, 0), e(3, 1)], Backend::DEFAULT_FD) - 1.0).abs() < 1e-9
        );
    }

    #[test]
    fn d_of_scaled_form_matches_df_wedge() {
        // d(f dx₀∧dx₁) = df ∧ dx₀ ∧ dx₁; on (e₂, e₀, e₁) this is ∂₂f
        let w = Scaled2Form {
            n: 4,
            a: 0,
            b: 1,
            mode: 1,
        };
        let x = [0.3, -0.5, 0.8, 0.2];
        let q = 1.0 + x.iter().map(|c| c * c).sum::<f64>();
        let df2 = -2.0 * x[2] / (q * q);
        for b in [Backend::Dual, Backend::DEFAULT_FD] {
            let v = numeric_d(&w, &x, &[e(4, 2), e(4, 0), e(4, 1)], b);
            assert!((v - df2).abs() < 1e-7);
        }
    }
}
