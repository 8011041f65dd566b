//! Adaptive Dormand–Prince 8(5,3) integrator for smooth fixed-size systems.

use crate::{Error, Result};

/// Integration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    /// Relative tolerance per step.
    pub rtol: f64,
    /// Absolute tolerance per step.
    pub atol: f64,
    /// Upper bound on accepted plus rejected steps.
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            max_steps: 200_000,
        }
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self::with_tol(1e-12)
    }
}

/// Counters reported by a completed integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Integrates y' = f(t, y) from `t0` to `t1`, overwriting `y`.
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    t1: f64,
    y: &mut [f64; N],
    opts: &OdeOptions,
) -> Result<OdeStats>
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    let mut stats = OdeStats::default();
    if t1 == t0 {
        return Ok(stats);
    }
    let dir = (t1 - t0).signum();
    let mut t = t0;
    let mut k1 = [0.0; N];
    f(t, y, &mut k1);
    stats.evaluations += 1;
    let mut h = initial_step(&f, t, y, &k1, dir, opts);
    stats.evaluations += 1;
    let mut last_rejected = false;

    let mut k = [[0.0; N]; 12];
    let mut tmp = [0.0; N];
    let mut ynew = [0.0; N];
    let mut k13 = [0.0; N];

    while (t1 - t) * dir > 0.0 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepUnderflow { t });
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t });
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        k[0] = k1;
        for s in 1..12 {
            for i in 0..N {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += a * kj[i];
                    }
                }
                tmp[i] = y[i] + h * acc;
            }
            f(t + C[s] * h, &tmp, &mut k[s]);
        }
        stats.evaluations += 11;
        for i in 0..N {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc += B[j] * kj[i];
            }
            ynew[i] = y[i] + h * acc;
        }
        // Error estimate: fifth-order and third-order embedded solutions.
        let mut err5 = 0.0;
        let mut err3 = 0.0;
        for i in 0..N {
            let sk = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            let mut e5 = 0.0;
            let mut b_sum = 0.0;
            for j in 0..12 {
                e5 += ER[j] * k[j][i];
                b_sum += B[j] * k[j][i];
            }
            let e3 = b_sum - BHH[0] * k[0][i] - BHH[1] * k[8][i] - BHH[2] * k[11][i];
            err5 += (e5 / sk).powi(2);
            err3 += (e3 / sk).powi(2);
        }
        let mut deno = err5 + 0.01 * err3;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * err5 * (1.0 / (deno * N as f64)).sqrt();

        let fac11 = err.powf(1.0 / 8.0);
        let fac = (fac11 / SAFETY).clamp(1.0 / MAX_GROWTH, 1.0 / MIN_SHRINK);
        let mut hnew = h / fac;
        if err <= 1.0 {
            stats.accepted += 1;
            f(t + h, &ynew, &mut k13);
            stats.evaluations += 1;
            k1 = k13;
            *y = ynew;
            t += h;
            if last_rejected {
                hnew = dir * hnew.abs().min(h.abs());
            }
            last_rejected = false;
        } else {
            hnew = h / (fac11 / SAFETY).min(1.0 / MIN_SHRINK);
            stats.rejected += 1;
            last_rejected = true;
        }
        h = hnew;
    }
    Ok(stats)
}

fn initial_step<const N: usize, F>(
    f: &F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    dir: f64,
    opts: &OdeOptions,
) -> f64
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y[i].abs();
        dnf += (f0[i] / sk).powi(2);
        dny += (y[i] / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(1.0) * dir;
    let mut y1 = [0.0; N];
    for i in 0..N {
        y1[i] = y[i] + h * f0[i];
    }
    let mut f1 = [0.0; N];
    f(t + h, &y1, &mut f1);
    let mut der2 = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y[i].abs();
        der2 += ((f1[i] - f0[i]) / sk).powi(2);
    }
    let der2 = der2.sqrt() / h.abs();
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h.abs() * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(1.0 / 8.0)
    };
    dir * (100.0 * h.abs()).min(h1).min(1.0)
}

const SAFETY: f64 = 0.9;
const MAX_GROWTH: f64 = 6.0;
const MIN_SHRINK: f64 = 0.333;

const C: [f64; 12] = [
    0.0,
    0.526001519587677318785587544488E-01,
    0.789002279381515978178381316732E-01,
    0.118350341907227396726757197510E+00,
    0.281649658092772603273242802490E+00,
    0.333333333333333333333333333333E+00,
    0.25E+00,
    0.307692307692307692307692307692E+00,
    0.651282051282051282051282051282E+00,
    0.6E+00,
    0.857142857142857142857142857142E+00,
    1.0,
];

const A: [[f64; 12]; 12] = {
    let mut a = [[0.0; 12]; 12];
    a[1][0] = 5.26001519587677318785587544488E-2;
    a[2][0] = 1.97250569845378994544595329183E-2;
    a[2][1] = 5.91751709536136983633785987549E-2;
    a[3][0] = 2.95875854768068491816892993775E-2;
    a[3][2] = 8.87627564304205475450678981324E-2;
    a[4][0] = 2.41365134159266685502369798665E-1;
    a[4][2] = -8.84549479328286085344864962717E-1;
    a[4][3] = 9.24834003261792003115737966543E-1;
    a[5][0] = 3.7037037037037037037037037037E-2;
    a[5][3] = 1.70828608729473871279604482173E-1;
    a[5][4] = 1.25467687566822425016691814123E-1;
    a[6][0] = 3.7109375E-2;
    a[6][3] = 1.70252211019544039314978060272E-1;
    a[6][4] = 6.02165389804559606850219397283E-2;
    a[6][5] = -1.7578125E-2;
    a[7][0] = 3.70920001185047927108779319836E-2;
    a[7][3] = 1.70383925712239993810214054705E-1;
    a[7][4] = 1.07262030446373284651809199168E-1;
    a[7][5] = -1.53194377486244017527936158236E-2;
    a[7][6] = 8.27378916381402288758473766002E-3;
    a[8][0] = 6.24110958716075717114429577812E-1;
    a[8][3] = -3.36089262944694129406857109825E0;
    a[8][4] = -8.68219346841726006818189891453E-1;
    a[8][5] = 2.75920996994467083049415600797E1;
    a[8][6] = 2.01540675504778934086186788979E1;
    a[8][7] = -4.34898841810699588477366255144E1;
    a[9][0] = 4.77662536438264365890433908527E-1;
    a[9][3] = -2.48811461997166764192642586468E0;
    a[9][4] = -5.90290826836842996371446475743E-1;
    a[9][5] = 2.12300514481811942347288949897E1;
    a[9][6] = 1.52792336328824235832596922938E1;
    a[9][7] = -3.32882109689848629194453265587E1;
    a[9][8] = -2.03312017085086261358222928593E-2;
    a[10][0] = -9.3714243008598732571704021658E-1;
    a[10][3] = 5.18637242884406370830023853209E0;
    a[10][4] = 1.09143734899672957818500254654E0;
    a[10][5] = -8.14978701074692612513997267357E0;
    a[10][6] = -1.85200656599969598641566180701E1;
    a[10][7] = 2.27394870993505042818970056734E1;
    a[10][8] = 2.49360555267965238987089396762E0;
    a[10][9] = -3.0467644718982195003823669022E0;
    a[11][0] = 2.27331014751653820792359768449E0;
    a[11][3] = -1.05344954667372501984066689879E1;
    a[11][4] = -2.00087205822486249909675718444E0;
    a[11][5] = -1.79589318631187989172765950534E1;
    a[11][6] = 2.79488845294199600508499808837E1;
    a[11][7] = -2.85899827713502369474065508674E0;
    a[11][8] = -8.87285693353062954433549289258E0;
    a[11][9] = 1.23605671757943030647266201528E1;
    a[11][10] = 6.43392746015763530355970484046E-1;
    a
};

const B: [f64; 12] = [
    5.42937341165687622380535766363E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566E0,
    1.89151789931450038304281599044E0,
    -5.8012039600105847814672114227E0,
    3.1116436695781989440891606237E-1,
    -1.52160949662516078556178806805E-1,
    2.01365400804030348374776537501E-1,
    4.47106157277725905176885569043E-2,
];

const BHH: [f64; 3] = [
    0.244094488188976377952755905512E+00,
    0.733846688281611857341361741547E+00,
    0.220588235294117647058823529412E-01,
];

const ER: [f64; 12] = [
    0.1312004499419488073250102996E-01,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.1225156446376204440720569753E+01,
    -0.4957589496572501915214079952E+00,
    0.1664377182454986536961530415E+01,
    -0.3503288487499736816886487290E+00,
    0.3341791187130174790297318841E+00,
    0.8192320648511571246570742613E-01,
    -0.2235530786388629525884427845E-01,
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_full_period() {
        let mut y = [1.0, 0.0];
        let stats = integrate(
            |_, y: &[f64; 2], dy: &mut [f64; 2]| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            2.0 * std::f64::consts::PI,
            &mut y,
            &OdeOptions::with_tol(1e-12),
        )
        .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-11);
        assert!(y[1].abs() < 1e-11);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn exponential_growth_relative_accuracy() {
        let mut y = [1.0];
        integrate(
            |_, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = 3.0 * y[0],
            0.0,
            4.0,
            &mut y,
            &OdeOptions::with_tol(1e-12),
        )
        .unwrap();
        let exact = 12f64.exp();
        assert!(((y[0] - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn backward_integration() {
        let mut y = [1.0];
        integrate(
            |t, _y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = t.cos(),
            1.0,
            0.0,
            &mut y,
            &OdeOptions::default(),
        )
        .unwrap();
        assert!((y[0] - (1.0 - 1f64.sin())).abs() < 1e-12);
    }
}
