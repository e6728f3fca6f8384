//! Parameter lists: `lo:hi:step` and `lo:hi` (inclusive, exact decimal
//! arithmetic), comma lists, or a single value.

use isospec::analytic::parse_decimal;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

const MAX_ITEMS: usize = 100_000;

fn decimal(s: &str) -> Result<BigRational, String> {
    parse_decimal(s).map_err(|e| e.to_string())
}

fn float(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

pub fn parse(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let (lo, hi, step) = match parts.as_slice() {
            [lo, hi] => (decimal(lo)?, decimal(hi)?, BigRational::from_integer(1.into())),
            [lo, hi, step] => (decimal(lo)?, decimal(hi)?, decimal(step)?),
            _ => return Err(format!("bad range {spec:?}; expected lo:hi or lo:hi:step")),
        };
        if !step.is_positive() {
            return Err(format!("range step must be positive in {spec:?}"));
        }
        if hi < lo {
            return Err(format!("empty range {spec:?}"));
        }
        let mut out = Vec::new();
        let mut v = lo;
        while v <= hi {
            if out.len() == MAX_ITEMS {
                return Err(format!("range {spec:?} has more than {MAX_ITEMS} items"));
            }
            out.push(float(&v));
            v += &step;
        }
        return Ok(out);
    }
    let out: Vec<f64> = spec
        .split(',')
        .map(|s| decimal(s).map(|v| float(&v)))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err("empty parameter list".into());
    }
    Ok(out)
}
