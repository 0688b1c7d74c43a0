//! Named families, JSON files and inline JSON for states, channels,
//! Hamiltonians and phase-channel specs.

use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use roofkit::channels::{Channel, RandomPhaseSpec};
use roofkit::json::{parse_channel, parse_matrix, parse_state};
use roofkit::lab::ChannelGenerator;
use roofkit::quantum::random::{random_density, random_pure, rng_for};
use roofkit::quantum::{DensityMatrix, PureState};
use roofkit::{CMatrix, CVector, C};

pub const STATE_NAMES: &str =
    "maximally-mixed:D, basis:D:I, bell, werner:F, random:D[:RANK], random-pure:D, or a JSON file";
pub const CHANNEL_NAMES: &str = "noiseless:D, depolarizing:D, dephasing:Q, random:IN:OUT:ENV, \
     complement:<channel>, phase:<spec>, or a JSON file";

/// Inline JSON or the contents of a file, with the source named in errors.
fn json_text(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).with_context(|| format!("cannot read '{arg}'"))
}

/// Adds line/column context to serde errors.
fn parse_json<T>(
    arg: &str,
    text: &str,
    parse: impl FnOnce(&str) -> roofkit::Result<T>,
) -> Result<T> {
    parse(text).map_err(|e| match e {
        roofkit::Error::Json(j) => anyhow!("{arg}: line {}, column {}: {j}", j.line(), j.column()),
        other => anyhow!("{arg}: {other}"),
    })
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| anyhow!("cannot parse {what} from '{s}'"))
}

fn bell() -> PureState<f64> {
    let h = C::new(0.5f64.sqrt(), 0.0);
    let z = C::new(0.0, 0.0);
    PureState::new(CVector::from_vec(vec![h, z, z, h])).expect("normalised")
}

/// Two-qubit Werner state with fidelity `f` to the Bell state.
pub fn werner(f: f64) -> Result<DensityMatrix<f64>> {
    if !(0.0..=1.0).contains(&f) {
        bail!("werner fidelity {f} outside [0, 1]");
    }
    let p = bell().projector();
    let rest = CMatrix::identity(4, 4) - &p;
    Ok(DensityMatrix::new(
        p * C::new(f, 0.0) + rest * C::new((1.0 - f) / 3.0, 0.0),
    )?)
}

pub fn state(arg: &str, seed: u64) -> Result<DensityMatrix<f64>> {
    let parts: Vec<&str> = arg.split(':').collect();
    let named = match parts.as_slice() {
        ["maximally-mixed", d] => Some(DensityMatrix::maximally_mixed(num(d, "dimension")?)),
        ["basis", d, i] => Some(DensityMatrix::basis(
            num(d, "dimension")?,
            num(i, "index")?,
        )?),
        ["bell"] => Some(bell().to_density()),
        ["werner", f] => Some(werner(num(f, "fidelity")?)?),
        ["random", d] => {
            let d = num(d, "dimension")?;
            Some(random_density(d, d, seed)?)
        }
        ["random", d, r] => Some(random_density(num(d, "dimension")?, num(r, "rank")?, seed)?),
        ["random-pure", d] => Some(random_pure(num(d, "dimension")?, seed)?.to_density()),
        _ => None,
    };
    match named {
        Some(s) => Ok(s),
        None => {
            let text = json_text(arg).with_context(|| format!("expected {STATE_NAMES}"))?;
            parse_json(arg, &text, parse_state)
        }
    }
}

pub fn channel(arg: &str, seed: u64) -> Result<Channel<f64>> {
    if let Some(inner) = arg.strip_prefix("complement:") {
        return Ok(channel(inner, seed)?.complementary());
    }
    if let Some(spec) = arg.strip_prefix("phase:") {
        return Ok(roofkit::channels::random_phase_channel(&phase_spec(spec)?)?);
    }
    let parts: Vec<&str> = arg.split(':').collect();
    let named = match parts.as_slice() {
        ["noiseless", d] => Some(Channel::noiseless(positive(num(d, "dimension")?)?)),
        ["depolarizing", d] => Some(Channel::completely_depolarizing(positive(num(
            d,
            "dimension",
        )?)?)),
        ["dephasing", q] => Some(Channel::dephasing(num(q, "dephasing parameter")?)?),
        ["random", i, o, e] => Some(Channel::random_stinespring(
            &mut rng_for(seed, 0),
            num(i, "input dimension")?,
            num(o, "output dimension")?,
            num(e, "environment dimension")?,
        )?),
        _ => None,
    };
    match named {
        Some(c) => Ok(c),
        None => {
            let text = json_text(arg).with_context(|| format!("expected {CHANNEL_NAMES}"))?;
            parse_json(arg, &text, parse_channel)
        }
    }
}

fn positive(d: usize) -> Result<usize> {
    if d == 0 {
        bail!("dimension must be positive");
    }
    Ok(d)
}

/// Scan generator from a short name or generator JSON.
pub fn generator(arg: &str) -> Result<ChannelGenerator> {
    if let Some(spec) = arg.strip_prefix("phase:") {
        return Ok(ChannelGenerator::Phase {
            spec: phase_spec(spec)?,
        });
    }
    let parts: Vec<&str> = arg.split(':').collect();
    let named = match parts.as_slice() {
        ["noiseless", d] => Some(ChannelGenerator::Noiseless {
            dim: num(d, "dimension")?,
        }),
        ["depolarizing", d] => Some(ChannelGenerator::Depolarizing {
            dim: num(d, "dimension")?,
        }),
        ["dephasing"] => Some(ChannelGenerator::Dephasing { q: None }),
        ["dephasing", q] => Some(ChannelGenerator::Dephasing {
            q: Some(num(q, "dephasing parameter")?),
        }),
        ["stinespring", i, o, e] => Some(ChannelGenerator::RandomStinespring {
            in_dim: num(i, "input dimension")?,
            out_dim: num(o, "output dimension")?,
            env_dim: num(e, "environment dimension")?,
        }),
        ["measure-prepare", d, m, o] => Some(ChannelGenerator::MeasurePrepare {
            dim: num(d, "dimension")?,
            outcomes: num(m, "outcome count")?,
            out_dim: num(o, "output dimension")?,
        }),
        _ => None,
    };
    match named {
        Some(g) => Ok(g),
        None => {
            let text =
                json_text(arg).with_context(|| format!("unknown channel generator '{arg}'"))?;
            parse_json(arg, &text, |t| {
                serde_json::from_str(t).map_err(roofkit::Error::from)
            })
        }
    }
}

/// `diag:E0,E1,...` or a matrix JSON file.
pub fn hamiltonian(arg: &str) -> Result<CMatrix<f64>> {
    if let Some(list) = arg.strip_prefix("diag:") {
        let e = list
            .split(',')
            .map(|x| num::<f64>(x.trim(), "energy"))
            .collect::<Result<Vec<_>>>()?;
        return Ok(CMatrix::from_diagonal(&CVector::from_iterator(
            e.len(),
            e.iter().map(|&x| C::new(x, 0.0)),
        )));
    }
    let text = json_text(arg).context("expected diag:E0,E1,... or a matrix JSON file")?;
    parse_json(arg, &text, parse_matrix)
}

pub fn phase_spec(arg: &str) -> Result<RandomPhaseSpec> {
    let text = json_text(arg)?;
    let spec: RandomPhaseSpec = parse_json(arg, &text, |t| {
        serde_json::from_str(t).map_err(roofkit::Error::from)
    })?;
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_states() {
        assert_eq!(state("maximally-mixed:4", 0).unwrap().dim(), 4);
        assert_eq!(state("bell", 0).unwrap().rank().unwrap(), 1);
        assert_eq!(state("random:3:2", 1).unwrap().rank().unwrap(), 2);
        assert_eq!(
            state("random:3:2", 1).unwrap(),
            state("random:3:2", 1).unwrap()
        );
        assert!(state("werner:1.5", 0).is_err());
        assert!(state("no-such-thing", 0).is_err());
        let pure = state(r#"{"re":[0,1],"im":[0,0]}"#, 0).unwrap();
        assert_eq!(pure, DensityMatrix::basis(2, 1).unwrap());
    }

    #[test]
    fn json_errors_carry_position() {
        let err = state("{\"dim\": 2,\n \"re\": [[1, 0], [0 0]]}", 0)
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn named_channels() {
        assert_eq!(channel("noiseless:3", 0).unwrap().in_dim(), 3);
        assert_eq!(channel("complement:noiseless:3", 0).unwrap().out_dim(), 1);
        assert_eq!(channel("random:2:3:2", 5).unwrap().out_dim(), 3);
        assert!(channel("dephasing:2", 0).is_err());
        let ph = channel(
            r#"phase:{"a":1.0,"d":3,"density":{"family":"gaussian","s":1.0}}"#,
            0,
        )
        .unwrap();
        assert_eq!(ph.in_dim(), 3);
    }

    #[test]
    fn generators() {
        assert_eq!(
            generator("dephasing").unwrap(),
            ChannelGenerator::Dephasing { q: None }
        );
        assert!(matches!(
            generator("measure-prepare:2:3:2").unwrap(),
            ChannelGenerator::MeasurePrepare { outcomes: 3, .. }
        ));
        let g = generator(r#"{"family":"noiseless","dim":2}"#).unwrap();
        assert_eq!(g, ChannelGenerator::Noiseless { dim: 2 });
        assert!(generator("cauchy").is_err());
    }

    #[test]
    fn hamiltonians() {
        let h = hamiltonian("diag:0,1,2").unwrap();
        assert_eq!(h[(2, 2)].re, 2.0);
        assert!(hamiltonian("diag:0,x").is_err());
    }
}
