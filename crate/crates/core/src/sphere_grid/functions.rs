use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::to_cartesian;
use crate::error::{Error, Result};

/// A function of `(theta, phi)`.
pub type Evaluator = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

/// A named function on the sphere with optional analytic partials.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    smoothness: String,
    value: Evaluator,
    d_theta: Option<Evaluator>,
    d_phi: Option<Evaluator>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("smoothness", &self.smoothness)
            .field("has_partials", &self.has_partials())
            .finish()
    }
}

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        smoothness: impl Into<String>,
        value: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        TestFunction {
            name: name.into(),
            smoothness: smoothness.into(),
            value: Arc::new(value),
            d_theta: None,
            d_phi: None,
        }
    }

    pub fn with_partials(
        mut self,
        d_theta: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        d_phi: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        self.d_theta = Some(Arc::new(d_theta));
        self.d_phi = Some(Arc::new(d_phi));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn smoothness(&self) -> &str {
        &self.smoothness
    }

    pub fn eval(&self, theta: f64, phi: f64) -> Complex64 {
        (self.value)(theta, phi)
    }

    pub fn has_partials(&self) -> bool {
        self.d_theta.is_some() && self.d_phi.is_some()
    }

    pub fn d_theta(&self, theta: f64, phi: f64) -> Option<Complex64> {
        self.d_theta.as_ref().map(|f| f(theta, phi))
    }

    pub fn d_phi(&self, theta: f64, phi: f64) -> Option<Complex64> {
        self.d_phi.as_ref().map(|f| f(theta, phi))
    }
}

const NAMES: [&str; 5] = ["F1", "F2", "F3", "F4", "one"];

pub fn builtin_names() -> &'static [&'static str] {
    &NAMES
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Looks up a built-in test function by name (case-insensitive).
pub fn builtin(name: &str) -> Result<TestFunction> {
    match name.to_ascii_lowercase().as_str() {
        "f1" => Ok(f1()),
        "f2" => Ok(power_yz("F2", 0.5, "H^(4-eps)")),
        "f3" => Ok(power_yz("F3", -0.5, "H^(2-eps)")),
        "f4" => Ok(f4()),
        "one" | "const" | "1" => Ok(TestFunction::new("one", "C^inf", |_, _| re(1.0))
            .with_partials(|_, _| re(0.0), |_, _| re(0.0))),
        _ => Err(Error::UnknownFunction {
            name: name.to_string(),
            available: NAMES.join(", "),
        }),
    }
}

/// `1 / (4 + x + y + z)`.
fn f1() -> TestFunction {
    fn denom(t: f64, p: f64) -> f64 {
        let [x, y, z] = to_cartesian(t, p);
        4.0 + x + y + z
    }
    TestFunction::new("F1", "C^inf", |t, p| re(1.0 / denom(t, p))).with_partials(
        |t, p| {
            let (st, ct) = t.sin_cos();
            let (sp, cp) = p.sin_cos();
            let dd = ct * cp + ct * sp - st;
            re(-dd / denom(t, p).powi(2))
        },
        |t, p| {
            let st = t.sin();
            let (sp, cp) = p.sin_cos();
            let dd = st * (cp - sp);
            re(-dd / denom(t, p).powi(2))
        },
    )
}

/// `(1 - x^2)^power * y * z`, extended by zero where `1 - x^2 = 0`.
///
/// `1 - x^2` is evaluated as `y^2 + z^2` to avoid cancellation near `(+-1, 0, 0)`.
fn power_yz(name: &'static str, power: f64, smoothness: &'static str) -> TestFunction {
    fn parts(t: f64, p: f64) -> (f64, f64, f64, f64, f64) {
        let (st, ct) = t.sin_cos();
        let (sp, cp) = p.sin_cos();
        (st, ct, sp, cp, ct * ct + st * st * sp * sp)
    }
    TestFunction::new(name, smoothness, move |t, p| {
        let (st, ct, sp, _, g) = parts(t, p);
        if g == 0.0 {
            return re(0.0);
        }
        re(g.powf(power) * st * sp * ct)
    })
    .with_partials(
        move |t, p| {
            let (st, ct, sp, cp, g) = parts(t, p);
            if g == 0.0 {
                return re(0.0);
            }
            let h = st * sp * ct;
            let dg = -2.0 * st * ct * cp * cp;
            let dh = sp * (ct * ct - st * st);
            re(power * g.powf(power - 1.0) * dg * h + g.powf(power) * dh)
        },
        move |t, p| {
            let (st, ct, sp, cp, g) = parts(t, p);
            if g == 0.0 {
                return re(0.0);
            }
            let h = st * sp * ct;
            let dg = 2.0 * st * st * cp * sp;
            let dh = st * cp * ct;
            re(power * g.powf(power - 1.0) * dg * h + g.powf(power) * dh)
        },
    )
}

/// `|x - x*|^3` with `x* = (1, 1, 1) / sqrt(3)`.
fn f4() -> TestFunction {
    const A: f64 = 0.577_350_269_189_625_8; // 1/sqrt(3)
    fn diff(t: f64, p: f64) -> [f64; 3] {
        let [x, y, z] = to_cartesian(t, p);
        [x - A, y - A, z - A]
    }
    fn dist(d: [f64; 3]) -> f64 {
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
    TestFunction::new("F4", "H^(4-eps)", |t, p| re(dist(diff(t, p)).powi(3))).with_partials(
        |t, p| {
            let d = diff(t, p);
            let (st, ct) = t.sin_cos();
            let (sp, cp) = p.sin_cos();
            let dx = [ct * cp, ct * sp, -st];
            re(3.0 * dist(d) * (d[0] * dx[0] + d[1] * dx[1] + d[2] * dx[2]))
        },
        |t, p| {
            let d = diff(t, p);
            let st = t.sin();
            let (sp, cp) = p.sin_cos();
            re(3.0 * dist(d) * (-d[0] * st * sp + d[1] * st * cp))
        },
    )
}
