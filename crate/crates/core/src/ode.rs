//! Dormand-Prince 8(5,3) integrator with Hairer's step-size control.
//!
//! The solver stops exactly at each requested output abscissa; no dense
//! output is used, so every returned state is a full integration step.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at x = {x}")]
    StepSizeUnderflow { x: f64 },
    #[error("maximum number of steps ({steps}) exceeded at x = {x}")]
    MaxSteps { x: f64, steps: usize },
    #[error("non-finite state at x = {x}")]
    NonFinite { x: f64 },
    #[error("output abscissae must be monotone in the direction of integration")]
    Unordered,
}

#[derive(Debug, Clone, Copy)]
pub struct Dop853 {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dop853 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 1.0 / 6.0;
const FAC_MAX: f64 = 1.0 / 0.333;
const EXPO: f64 = 1.0 / 8.0;

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;
const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;
const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;
const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;
const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] += h * s;
    }
    out
}

fn finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

impl Dop853 {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.atol + self.rtol * a.abs().max(b.abs())
    }

    fn initial_step<const N: usize, F>(
        &self,
        f: &mut F,
        x: f64,
        y: &[f64; N],
        f0: &[f64; N],
        dir: f64,
    ) -> f64
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let (mut dnf, mut dny) = (0.0, 0.0);
        for i in 0..N {
            let sk = self.scale(y[i], 0.0);
            dnf += (f0[i] / sk).powi(2);
            dny += (y[i] / sk).powi(2);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            (dny / dnf).sqrt() * 0.01
        };
        h = h.min(self.h_max);
        let y1 = axpy(y, dir * h, &[(1.0, f0)]);
        let f1 = f(x + dir * h, &y1);
        let mut der2 = 0.0;
        for i in 0..N {
            let sk = self.scale(y[i], 0.0);
            der2 += ((f1[i] - f0[i]) / sk).powi(2);
        }
        let der2 = der2.sqrt() / h;
        let der12 = der2.max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(1.0 / 8.0)
        };
        (100.0 * h).min(h1).min(self.h_max)
    }

    /// One trial step. Returns the new state, its derivative and the scaled
    /// error norm.
    fn step<const N: usize, F>(
        &self,
        f: &mut F,
        x: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> ([f64; N], [f64; N], f64)
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let k2 = f(x + C2 * h, &axpy(y, h, &[(A21, k1)]));
        let k3 = f(x + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
        let k4 = f(x + C4 * h, &axpy(y, h, &[(A41, k1), (A43, &k3)]));
        let k5 = f(
            x + C5 * h,
            &axpy(y, h, &[(A51, k1), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            x + C6 * h,
            &axpy(y, h, &[(A61, k1), (A64, &k4), (A65, &k5)]),
        );
        let k7 = f(
            x + C7 * h,
            &axpy(y, h, &[(A71, k1), (A74, &k4), (A75, &k5), (A76, &k6)]),
        );
        let k8 = f(
            x + C8 * h,
            &axpy(
                y,
                h,
                &[(A81, k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)],
            ),
        );
        let k9 = f(
            x + C9 * h,
            &axpy(
                y,
                h,
                &[
                    (A91, k1),
                    (A94, &k4),
                    (A95, &k5),
                    (A96, &k6),
                    (A97, &k7),
                    (A98, &k8),
                ],
            ),
        );
        let k10 = f(
            x + C10 * h,
            &axpy(
                y,
                h,
                &[
                    (A101, k1),
                    (A104, &k4),
                    (A105, &k5),
                    (A106, &k6),
                    (A107, &k7),
                    (A108, &k8),
                    (A109, &k9),
                ],
            ),
        );
        let k11 = f(
            x + C11 * h,
            &axpy(
                y,
                h,
                &[
                    (A111, k1),
                    (A114, &k4),
                    (A115, &k5),
                    (A116, &k6),
                    (A117, &k7),
                    (A118, &k8),
                    (A119, &k9),
                    (A1110, &k10),
                ],
            ),
        );
        let k12 = f(
            x + h,
            &axpy(
                y,
                h,
                &[
                    (A121, k1),
                    (A124, &k4),
                    (A125, &k5),
                    (A126, &k6),
                    (A127, &k7),
                    (A128, &k8),
                    (A129, &k9),
                    (A1210, &k10),
                    (A1211, &k11),
                ],
            ),
        );
        let mut incr = [0.0; N];
        let mut ynew = *y;
        for i in 0..N {
            incr[i] = B1 * k1[i]
                + B6 * k6[i]
                + B7 * k7[i]
                + B8 * k8[i]
                + B9 * k9[i]
                + B10 * k10[i]
                + B11 * k11[i]
                + B12 * k12[i];
            ynew[i] += h * incr[i];
        }
        let (mut err, mut err2) = (0.0, 0.0);
        for i in 0..N {
            let sk = self.scale(y[i], ynew[i]);
            let e2 = incr[i] - BHH1 * k1[i] - BHH2 * k9[i] - BHH3 * k12[i];
            err2 += (e2 / sk).powi(2);
            let e = ER1 * k1[i]
                + ER6 * k6[i]
                + ER7 * k7[i]
                + ER8 * k8[i]
                + ER9 * k9[i]
                + ER10 * k10[i]
                + ER11 * k11[i]
                + ER12 * k12[i];
            err += (e / sk).powi(2);
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * err * (1.0 / (deno * N as f64)).sqrt();
        if !finite(&ynew) || !err.is_finite() {
            return (ynew, [f64::NAN; N], f64::INFINITY);
        }
        let knew = f(x + h, &ynew);
        if !finite(&knew) {
            return (ynew, knew, f64::INFINITY);
        }
        (ynew, knew, err)
    }

    /// Integrates `y' = f(x, y)` from `(x0, y0)` and returns the state at each
    /// abscissa in `outputs`, which must be monotone away from `x0`.
    pub fn solve<const N: usize, F>(
        &self,
        mut f: F,
        x0: f64,
        y0: [f64; N],
        outputs: &[f64],
    ) -> Result<Vec<[f64; N]>, OdeError>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let mut out = Vec::with_capacity(outputs.len());
        if outputs.is_empty() {
            return Ok(out);
        }
        let last = *outputs.last().unwrap();
        let dir = if last >= x0 { 1.0 } else { -1.0 };
        let mut prev = x0;
        for &t in outputs {
            if (t - prev) * dir < 0.0 {
                return Err(OdeError::Unordered);
            }
            prev = t;
        }

        let mut x = x0;
        let mut y = y0;
        let mut k1 = f(x, &y);
        if !finite(&k1) {
            return Err(OdeError::NonFinite { x });
        }
        let mut h = if last == x0 {
            0.0
        } else {
            self.initial_step(&mut f, x, &y, &k1, dir)
        };
        let mut steps = 0usize;
        let mut last_rejected = false;

        for &target in outputs {
            while (target - x) * dir > 0.0 {
                if steps >= self.max_steps {
                    return Err(OdeError::MaxSteps { x, steps });
                }
                let remaining = (target - x).abs();
                let clipped = h >= remaining;
                let h_try = if clipped { remaining } else { h };
                if h_try.abs() <= 1e-15 * x.abs().max(1.0) && !clipped {
                    return Err(OdeError::StepSizeUnderflow { x });
                }
                steps += 1;
                let (ynew, knew, err) = self.step(&mut f, x, &y, &k1, dir * h_try);
                let fac11 = err.powf(EXPO);
                if err <= 1.0 {
                    let fac = (fac11 / SAFE).clamp(FAC_MIN, FAC_MAX);
                    let mut hnew = (h_try / fac).min(self.h_max);
                    if last_rejected {
                        hnew = hnew.min(h_try);
                    }
                    last_rejected = false;
                    x = if clipped { target } else { x + dir * h_try };
                    y = ynew;
                    k1 = knew;
                    // a clipped step says nothing about the natural step size
                    h = if clipped { h.max(hnew) } else { hnew };
                } else {
                    let shrink = if err.is_finite() {
                        (fac11 / SAFE).min(FAC_MAX)
                    } else {
                        10.0
                    };
                    h = h_try / shrink;
                    last_rejected = true;
                    if h <= 1e-15 * x.abs().max(1.0) {
                        if err.is_finite() {
                            return Err(OdeError::StepSizeUnderflow { x });
                        }
                        return Err(OdeError::NonFinite { x });
                    }
                }
            }
            out.push(y);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_motion() {
        let s = Dop853::with_tolerances(1e-12, 1e-14);
        let ts: Vec<f64> = (1..=20).map(|i| i as f64 * 0.5).collect();
        let ys = s
            .solve(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], &ts)
            .unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[0] - t.sin()).abs() < 1e-10, "{t}");
            assert!((y[1] - t.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn backward_exponential() {
        let s = Dop853::with_tolerances(1e-12, 1e-14);
        let ys = s
            .solve(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], &[-1.0, -3.0])
            .unwrap();
        assert!((ys[1][0] - (-3.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn blow_up_is_reported() {
        let s = Dop853::default();
        let r = s.solve(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], &[2.0]);
        assert!(r.is_err());
    }

    #[test]
    fn unordered_outputs_rejected() {
        let s = Dop853::default();
        let r = s.solve(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], &[1.0, 0.5]);
        assert_eq!(r.unwrap_err(), OdeError::Unordered);
    }
}
