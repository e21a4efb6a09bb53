//! Figure recipes: the run configurations that regenerate each figure's
//! underlying data series.

use crate::config::{CommandKind, QuantityArg, RunConfig};

/// Resolve a figure name (Fig1..Fig13) to the configs producing its data.
///
/// Most figures map to one config; the two-case comparisons (Fig12, Fig13)
/// map to two.
pub fn figure_recipe(name: &str) -> Result<Vec<RunConfig>, String> {
    let base = |command| {
        let mut c = RunConfig::new(command);
        c.k = 30.0;
        c.m = 0;
        c
    };
    let sweep_line =
        |quantity, re: (f64, f64, usize), im: (f64, f64, usize), n: usize| {
            let mut c = base(CommandKind::Sweep);
            c.quantity = Some(quantity);
            c.re_min = Some(re.0);
            c.re_max = Some(re.1);
            c.re_resolution = Some(re.2);
            c.im_min = Some(im.0);
            c.im_max = Some(im.1);
            c.im_resolution = Some(im.2);
            c.n_modes = n;
            c
        };
    let normalized = name.trim().to_lowercase();
    let fig: u32 = normalized
        .strip_prefix("fig")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format!("unknown figure name '{name}' (expected Fig1..Fig13)"))?;
    let configs = match fig {
        // typical eigenvalue distribution, m = 0
        1 => {
            let mut c = base(CommandKind::Modes);
            c.beta_re = 0.4;
            c.beta_im = 0.2;
            c.n_modes = 35;
            vec![c]
        }
        // eigenvalues/eigenfunctions across azimuthal orders; the detailed
        // panels are the m = 2 family
        2 => {
            let mut c = base(CommandKind::Modes);
            c.m = 2;
            c.beta_re = 0.4;
            c.beta_im = 0.2;
            c.n_modes = 35;
            vec![c]
        }
        // eigenvalue trajectories across the first Cremer optimum
        3 => vec![sweep_line(
            QuantityArg::GammaRe,
            (0.095, 0.105, 256),
            (0.042655, 0.042655, 1),
            2,
        )],
        // mutual overlap of the (0, 1) pair vs Im(beta0) at Re(beta0) = 0.099
        4 => vec![sweep_line(
            QuantityArg::SijRe,
            (0.099, 0.099, 1),
            (0.03, 0.05, 201),
            2,
        )],
        // |self-overlap| of modes 0 and 1 along the same line: the lattice
        // stores log10(K_p); |self-overlap| = K_p^(-1/2)
        5 => vec![sweep_line(
            QuantityArg::Kp,
            (0.099, 0.099, 1),
            (0.03, 0.05, 201),
            2,
        )],
        // trajectories vs Im(beta0) passing the first EP at Re(beta0) = 0.09935
        6 => vec![sweep_line(
            QuantityArg::GammaIm,
            (0.09935, 0.09935, 1),
            (0.0, 0.05, 201),
            2,
        )],
        // distribution of the first 10 EPs
        7 => {
            let mut c = base(CommandKind::Ep);
            c.count = Some(10);
            vec![c]
        }
        // Riemann surfaces over the admittance plane, first three modes
        8 => vec![sweep_line(
            QuantityArg::GammaRe,
            (0.0, 0.25, 101),
            (0.0, 0.1, 51),
            3,
        )],
        9 => vec![sweep_line(
            QuantityArg::GammaIm,
            (0.0, 0.25, 101),
            (0.0, 0.1, 51),
            3,
        )],
        // S_01 over the admittance plane
        10 => vec![sweep_line(
            QuantityArg::SijRe,
            (0.02, 0.18, 81),
            (0.0, 0.09, 46),
            2,
        )],
        // log10(K_p) of mode 0 over the admittance plane
        11 => vec![sweep_line(
            QuantityArg::Kp,
            (0.02, 0.18, 81),
            (0.0, 0.09, 46),
            1,
        )],
        // sound power vs z for the two cases: Z = 0.1 - j and the near-EP
        // admittance
        12 => {
            let mut case1 = base(CommandKind::Power);
            case1.z_re = Some(0.1);
            case1.z_im = Some(-1.0);
            case1.z_max = Some(10.0);
            case1.z_points = Some(201);
            let mut case2 = base(CommandKind::Power);
            case2.beta_re = 0.0993;
            case2.beta_im = 0.0427;
            case2.z_max = Some(10.0);
            case2.z_points = Some(201);
            vec![case1, case2]
        }
        // K_p and S_ij for the same two cases
        13 => {
            let mut case1 = base(CommandKind::Nonortho);
            case1.z_re = Some(0.1);
            case1.z_im = Some(-1.0);
            let mut case2 = base(CommandKind::Nonortho);
            case2.beta_re = 0.0993;
            case2.beta_im = 0.0427;
            vec![case1, case2]
        }
        _ => return Err(format!("unknown figure Fig{fig} (expected Fig1..Fig13)")),
    };
    Ok(configs)
}
