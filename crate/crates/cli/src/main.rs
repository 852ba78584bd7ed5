use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use hypdom::caratheodory::{car_ball_components, car_interval, default_dictionary};
use hypdom::conformal::{
    canonical_annulus_radius, cartan_check, grid_modulus, isotropy_group, watt_check, HoloSelfMap,
    DEFAULT_TOL,
};
use hypdom::domains::DomainSpec;
use hypdom::export::{ball_svg, csv, fmt_g};
use hypdom::geometry::ComplexPoint;
use hypdom::grid::{grid_annulus, grid_load, GridDomain};
use hypdom::kobayashi::{kob_ball_raster, kob_distance};
use hypdom::topology::{
    complement_components, connectivity_number, nerve_cover, separating_cycle, winding_number,
};
use hypdom::verify::{run_all, Mode};
use hypdom::{Error, Result};

/// Invariant metrics on hyperbolic planar domains.
///
/// Domains: disk | halfplane | punctured | annulus:R | grid:PATH.
/// Points are written `re,im`.
#[derive(Parser, Debug)]
#[command(name = "hypdom", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distance interval between two points.
    Dist {
        #[arg(long, value_parser = parse_domain)]
        domain: DomainSpec,
        #[arg(long, value_enum, default_value_t = Metric::Kobayashi)]
        metric: Metric,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        p: Complex64,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        q: Complex64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Rasterize a metric ball and report its connectivity.
    Ball {
        #[arg(long, value_parser = parse_domain)]
        domain: DomainSpec,
        #[arg(long, value_enum, default_value_t = Metric::Kobayashi)]
        metric: Metric,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        center: Complex64,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 0.01)]
        spacing: f64,
        /// Write an SVG rendering of the ball.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write the ball raster as a grid file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Separating polygon between two complement components of a grid domain.
    Separate {
        #[arg(long, value_parser = parse_domain)]
        domain: DomainSpec,
        /// Rasterization spacing for catalog annuli.
        #[arg(long, default_value_t = 0.02)]
        spacing: f64,
        /// Label of the bounded component to enclose (default: first bounded).
        #[arg(long)]
        k1: Option<usize>,
        /// Label of the component to exclude (default: first unbounded).
        #[arg(long)]
        k2: Option<usize>,
    },
    /// Nerve cycle rank against raster connectivity for Kobayashi balls.
    Nerve {
        #[arg(long, value_parser = parse_domain)]
        domain: DomainSpec,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        center: Complex64,
        #[arg(long, required = true, num_args = 1..)]
        radius: Vec<f64>,
        #[arg(long, default_value_t = 0.02)]
        spacing: f64,
        #[arg(long, default_value_t = 0.5)]
        r_cover: f64,
    },
    /// Conformal modulus and canonical radius of a doubly-connected domain.
    Modulus {
        #[arg(long, value_parser = parse_domain)]
        domain: DomainSpec,
        #[arg(long, default_value_t = 0.02)]
        spacing: f64,
    },
    /// Isotropy group of a point in an annulus.
    Isotropy {
        #[arg(long, value_parser = parse_domain)]
        domain: DomainSpec,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        p: Complex64,
    },
    /// Automorphism certificate or contraction witness for a disk self-map.
    Watt {
        /// power:N | rotation:THETA | blaschke:RE,IM;RE,IM;…
        #[arg(long, value_parser = parse_map, allow_hyphen_values = true)]
        map: HoloSelfMap,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        a: Complex64,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        b: Complex64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Derivative bound at a fixed point of a disk self-map.
    Cartan {
        #[arg(long, value_parser = parse_map, allow_hyphen_values = true)]
        map: HoloSelfMap,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        a: Complex64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Run the acceptance suite.
    VerifyAll {
        /// Coarse spacing for the canonical-annulus criterion.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Metric {
    Kobayashi,
    Caratheodory,
}

impl Metric {
    fn name(self) -> &'static str {
        match self {
            Metric::Kobayashi => "kobayashi",
            Metric::Caratheodory => "caratheodory",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Csv,
}

fn parse_point(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected re,im, got '{s}'"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    let z = Complex64::new(parse(re)?, parse(im)?);
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("non-finite point '{s}'"))
    }
}

fn parse_domain(s: &str) -> std::result::Result<DomainSpec, String> {
    let d = match s.split_once(':') {
        None => match s {
            "disk" => DomainSpec::Disk,
            "halfplane" => DomainSpec::HalfPlane,
            "punctured" => DomainSpec::PuncturedDisk,
            _ => return Err(format!("unknown domain '{s}'")),
        },
        Some(("annulus", r)) => {
            let r: f64 = r
                .parse()
                .map_err(|e| format!("annulus radius '{r}': {e}"))?;
            DomainSpec::annulus(r).map_err(|e| e.to_string())?
        }
        Some(("grid", path)) => {
            let bytes = fs::read(path).map_err(|e| format!("{path}: {e}"))?;
            DomainSpec::Grid(grid_load(&bytes).map_err(|e| e.to_string())?)
        }
        _ => return Err(format!("unknown domain '{s}'")),
    };
    Ok(d)
}

fn parse_map(s: &str) -> std::result::Result<HoloSelfMap, String> {
    let (kind, arg) = s
        .split_once(':')
        .ok_or_else(|| format!("expected KIND:ARGS, got '{s}'"))?;
    let map = match kind {
        "power" => HoloSelfMap::disk_power(arg.parse().map_err(|e| format!("power '{arg}': {e}"))?),
        "rotation" => {
            HoloSelfMap::disk_rotation(arg.parse().map_err(|e| format!("angle '{arg}': {e}"))?)
        }
        "blaschke" => {
            let zeros = arg
                .split(';')
                .map(parse_point)
                .collect::<std::result::Result<Vec<_>, _>>()?;
            HoloSelfMap::blaschke(&zeros, 0.0)
        }
        _ => return Err(format!("unknown map kind '{kind}'")),
    };
    map.map_err(|e| e.to_string())
}

fn grid_of(domain: &DomainSpec, spacing: f64) -> Result<GridDomain> {
    match domain {
        DomainSpec::Grid(g) => Ok(g.clone()),
        DomainSpec::Annulus(r) => grid_annulus(*r, spacing),
        d => Err(Error::Unsupported(format!(
            "{} has no bounded complement component",
            d.name()
        ))),
    }
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

fn run(cmd: Command) -> Result<(String, bool)> {
    let mut out = String::new();
    match cmd {
        Command::Dist {
            domain,
            metric,
            p,
            q,
            tol,
            format,
        } => {
            let iv = match metric {
                Metric::Kobayashi => kob_distance(&domain, p, q, tol)?,
                Metric::Caratheodory => {
                    car_interval(&domain, p, q, &default_dictionary(&domain)?, tol)?
                }
            };
            match format {
                Format::Text => {
                    out += &format!(
                        "metric = {}\nlower = {}\nupper = {}\ncertified = {}\n",
                        metric.name(),
                        fmt_g(iv.lower),
                        fmt_g(iv.upper),
                        iv.certified
                    );
                }
                Format::Csv => out += &csv(&["lower", "upper"], &[vec![iv.lower, iv.upper]]),
            }
        }
        Command::Ball {
            domain,
            metric,
            center,
            radius,
            spacing,
            svg,
            out: grid_out,
        } => match metric {
            Metric::Kobayashi => {
                let ball = kob_ball_raster(&domain, center, radius, spacing)?;
                out += &format!(
                    "cells = {}\nconnectivity = {}\n",
                    ball.raster.count(),
                    connectivity_number(&ball.raster)?
                );
                if let Some(path) = svg {
                    write_file(
                        &path,
                        ball_svg(&ball.frame, &ball.domain_mask(), &ball.raster).as_bytes(),
                    )?;
                }
                if let Some(path) = grid_out {
                    write_file(&path, &ball.export())?;
                }
            }
            Metric::Caratheodory => {
                let dict = default_dictionary(&domain)?;
                let rep = car_ball_components(&domain, center, radius, &dict, spacing)?;
                out += &format!("cells = {}\n", rep.ball.count());
                out += &rep.export();
                if let Some(path) = svg {
                    write_file(
                        &path,
                        ball_svg(&rep.frame, &domain.mask(&rep.frame), &rep.ball).as_bytes(),
                    )?;
                }
                if grid_out.is_some() {
                    return Err(Error::Unsupported(
                        "--out is available for Kobayashi balls only".into(),
                    ));
                }
                rep.ensure_lemma()?;
            }
        },
        Command::Separate {
            domain,
            spacing,
            k1,
            k2,
        } => {
            let grid = grid_of(&domain, spacing)?;
            let comps = complement_components(grid.mask());
            let k1 = k1
                .or(comps.bounded.first().copied())
                .ok_or(Error::WrongConnectivity(comps.count()))?;
            let k2 = k2.unwrap_or(comps.unbounded[0]);
            let poly = separating_cycle(&grid, k1, k2)?;
            out += &poly.export();
            out += "label,cells,winding_min,winding_max\n";
            let f = grid.frame();
            let mut labels: Vec<usize> = comps
                .bounded
                .iter()
                .chain(&comps.unbounded)
                .copied()
                .collect();
            labels.sort_unstable();
            for l in labels {
                let (mut n, mut lo, mut hi) = (0, i64::MAX, i64::MIN);
                for j in 0..f.height {
                    for i in 0..f.width {
                        if comps.labels.label(i, j) == l {
                            let w = winding_number(&poly, ComplexPoint::Finite(f.center(i, j)))?;
                            n += 1;
                            lo = lo.min(w);
                            hi = hi.max(w);
                        }
                    }
                }
                out += &format!("{l},{n},{lo},{hi}\n");
            }
        }
        Command::Nerve {
            domain,
            center,
            radius,
            spacing,
            r_cover,
        } => {
            out += "radius,connectivity,cycle_rank\n";
            let mut agree = true;
            for r in radius {
                let ball = kob_ball_raster(&domain, center, r, spacing)?;
                let conn = connectivity_number(&ball.raster)?;
                let rank = nerve_cover(&domain, &ball, r_cover)?.cycle_rank;
                agree &= conn == rank;
                out += &format!("{},{conn},{rank}\n", fmt_g(r));
            }
            if !agree {
                return Err(Error::TheoremViolation(format!(
                    "nerve cycle rank disagrees with connectivity\n{out}"
                )));
            }
        }
        Command::Modulus { domain, spacing } => {
            let grid = grid_of(&domain, spacing)?;
            let m = grid_modulus(&grid)?;
            out += &format!(
                "modulus = {}\nr_hat = {}\n",
                fmt_g(m),
                fmt_g(canonical_annulus_radius(m)?)
            );
        }
        Command::Isotropy { domain, p } => match domain {
            DomainSpec::Annulus(r) => out += &isotropy_group(r, p)?.export(),
            d => {
                return Err(Error::Unsupported(format!(
                    "isotropy is implemented for annuli, not {}",
                    d.name()
                )))
            }
        },
        Command::Watt { map, a, b, tol } => out += &watt_check(&map, a, b, tol)?.export(),
        Command::Cartan { map, a, tol } => out += &cartan_check(&map, a, tol)?.export(),
        Command::VerifyAll { quick } => {
            let results = run_all(if quick { Mode::Quick } else { Mode::Full });
            for r in &results {
                out += &r.line();
                out.push('\n');
            }
            return Ok((out, results.iter().all(|r| r.passed)));
        }
    }
    Ok((out, true))
}

const GRAMMAR: &str = "\
Grammar:
  hypdom <dist|ball|separate|nerve|modulus|isotropy|watt|cartan|verify-all> [OPTIONS]
  DOMAIN := disk | halfplane | punctured | annulus:R | grid:PATH
  POINT  := RE,IM
  MAP    := power:N | rotation:THETA | blaschke:RE,IM;RE,IM;...
Run `hypdom <COMMAND> --help` for the options of each command.";

/// 2 for a failed mathematical guarantee (a bug), 1 for anything the
/// caller can fix.
fn exit_code(e: &Error) -> u8 {
    if e.is_defect() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            eprintln!("\n{GRAMMAR}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defects_exit_with_two() {
        assert_eq!(exit_code(&Error::TheoremViolation("x".into())), 2);
        assert_eq!(exit_code(&Error::NonConvergence("x".into())), 2);
        assert_eq!(exit_code(&Error::Inconsistent("x".into())), 2);
        assert_eq!(exit_code(&Error::OutOfDomain("x".into())), 1);
        assert_eq!(exit_code(&Error::NoCorridor), 1);
    }

    #[test]
    fn point_and_domain_grammar() {
        assert_eq!(parse_point(" -0.5, 2").unwrap(), Complex64::new(-0.5, 2.0));
        assert!(parse_point("1").is_err() && parse_point("nan,0").is_err());
        assert_eq!(
            parse_domain("annulus:0.25").unwrap(),
            DomainSpec::Annulus(0.25)
        );
        assert!(parse_domain("annulus:0").is_err() && parse_domain("grid:/nonexistent").is_err());
        assert!(parse_map("power:3").is_ok() && parse_map("blaschke:0.9,0.9").is_err());
    }
}
