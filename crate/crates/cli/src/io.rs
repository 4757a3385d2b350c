//! JSON inputs: sampled functions, Omega and translation sets.

use std::path::Path;

use anyhow::{bail, Context, Result};
use lfharm::{Characteristic, FieldParams, LocalField, SampledFunction, Window};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// {q, p, c, char, level, values: [[re, im], ...]}, cells in digit order with the
/// lowest digit fastest. `low` (default 0) extends the window above D.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionFile {
    pub q: u32,
    pub p: u32,
    pub c: u32,
    /// 0 for Q_p, p for F_q((X)).
    pub char: u32,
    pub level: u32,
    #[serde(default)]
    pub low: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
    /// Total of |phi^|^2 over the whole field, when the file describes phi^.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_total: Option<f64>,
    pub values: Vec<[f64; 2]>,
}

impl FunctionFile {
    pub fn from_function(f: &SampledFunction) -> Self {
        let params = f.field().params();
        FunctionFile {
            q: params.q,
            p: params.p,
            c: params.c,
            char: match params.characteristic {
                Characteristic::Zero => 0,
                Characteristic::Positive => params.p,
            },
            level: f.level(),
            low: f.window().low,
            modulus: Some(params.modulus.clone()),
            declared_total: None,
            values: f.values().iter().map(|v| [v.re, v.im]).collect(),
        }
    }

    pub fn field(&self) -> Result<LocalField> {
        let characteristic = match self.char {
            0 => Characteristic::Zero,
            c if c == self.p => Characteristic::Positive,
            c => bail!("char must be 0 or p = {}, got {c}", self.p),
        };
        let field = LocalField::new(FieldParams::new(characteristic, self.p, self.c, self.modulus.clone())?)?;
        if field.q() != self.q {
            bail!("q = {} does not match p^c = {}", self.q, field.q());
        }
        Ok(field)
    }

    pub fn function(&self) -> Result<SampledFunction> {
        let field = self.field()?;
        let w = Window::new(self.low, self.level as i32)?;
        let vals = self.values.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        Ok(SampledFunction::on_window(&field, w, vals)?)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_function(path: &Path) -> Result<(FunctionFile, SampledFunction)> {
    let file: FunctionFile = read_json(path)?;
    let f = file.function().with_context(|| format!("in {}", path.display()))?;
    Ok((file, f))
}

#[derive(Debug, Clone, Deserialize)]
pub struct OmegaFile {
    /// [low, high] of the window group P^low / P^high.
    pub window: [i32; 2],
    /// Balls as [level, index]: the cells i of the window with i mod q^{level-low} == index.
    pub balls: Vec<[i64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct TranslationFile {
    /// Translations u(n).
    #[serde(default)]
    pub u: Vec<u64>,
    /// Translations given as cell indices of the window.
    #[serde(default)]
    pub cells: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_round_trip() {
        let field = LocalField::laurent(3, 1).unwrap();
        let f = lfharm::bank::random_function(&field, 2, 4).unwrap();
        let file = FunctionFile::from_function(&f);
        let text = serde_json::to_string(&file).unwrap();
        let back: FunctionFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.function().unwrap().values(), f.values());
    }

    #[test]
    fn bad_char_is_rejected() {
        let file = FunctionFile {
            q: 2,
            p: 2,
            c: 1,
            char: 5,
            level: 0,
            low: 0,
            modulus: None,
            declared_total: None,
            values: vec![[1.0, 0.0]],
        };
        assert!(file.function().is_err());
    }
}
