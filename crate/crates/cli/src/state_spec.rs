//! Initial-state spec grammar:
//! `atoms=<e/g per atom>;field=fock:<m>` or
//! `atoms=<...>;field=coherent:<re>,<im>`.

use num_complex::Complex64 as C64;

use tcqdm::error::Error;
use tcqdm::evolve::{AtomLevel, FieldState, InitialState};

pub fn parse(spec: &str, atoms: usize) -> Result<InitialState, Error> {
    let bad = |msg: String| Error::InvalidStateSpec(msg);
    let mut atom_part = None;
    let mut field_part = None;
    for section in spec.split(';') {
        let (key, value) = section
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got `{section}`")))?;
        match key.trim() {
            "atoms" => atom_part = Some(value.trim()),
            "field" => field_part = Some(value.trim()),
            other => return Err(bad(format!("unknown key `{other}`"))),
        }
    }
    let atom_part = atom_part.ok_or_else(|| bad("missing `atoms=` section".into()))?;
    let field_part = field_part.ok_or_else(|| bad("missing `field=` section".into()))?;

    if atom_part.len() != atoms {
        return Err(bad(format!(
            "expected {atoms} atom levels, got `{atom_part}`"
        )));
    }
    let levels: Vec<AtomLevel> = atom_part
        .chars()
        .map(|c| match c {
            'e' => Ok(AtomLevel::Excited),
            'g' => Ok(AtomLevel::Ground),
            other => Err(bad(format!("atom level must be e or g, got `{other}`"))),
        })
        .collect::<Result<_, _>>()?;

    let field = if let Some(m) = field_part.strip_prefix("fock:") {
        let m: u64 = m
            .trim()
            .parse()
            .map_err(|_| bad(format!("invalid Fock level `{m}`")))?;
        FieldState::Fock(m)
    } else if let Some(alpha) = field_part.strip_prefix("coherent:") {
        let (re, im) = alpha
            .split_once(',')
            .ok_or_else(|| bad(format!("coherent state needs re,im, got `{alpha}`")))?;
        let re: f64 =
            re.trim().parse().map_err(|_| bad(format!("invalid real part `{re}`")))?;
        let im: f64 =
            im.trim().parse().map_err(|_| bad(format!("invalid imaginary part `{im}`")))?;
        FieldState::Coherent(C64::new(re, im))
    } else {
        return Err(bad(format!(
            "field must be fock:<m> or coherent:<re>,<im>, got `{field_part}`"
        )));
    };

    Ok(InitialState { atoms: levels, field })
}
