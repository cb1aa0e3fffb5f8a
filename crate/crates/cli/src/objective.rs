//! Objective specifications for the confounded LP.
//!
//! An objective is a sum of terms `[coef *] atom` joined by `+` or `-`.
//! Atoms:
//!
//! | atom | meaning |
//! |---|---|
//! | `qa(i,j)`, `qb(i,j)` | `P(cause=i, R_Z=f_j)` in the `X → Z` / `Y → Z` model |
//! | `q(x,y,k)` | `P(X=x, Y=y, S=h_k)` in the joint model |
//! | `pa(j)`, `pb(j)` | `P(R_Z=f_j)` in the `X → Z` / `Y → Z` model |
//! | `mass` | total mass of the joint model |
//! | `cfa(x,z\|x',z')` | `P(Z_do(X=x)=z \| X=x', Z=z')` |
//! | `cfb(y,z\|y',z')` | `P(Z_do(Y=y)=z \| Y=y', Z=z')` |
//! | `cfc(x,y,z\|x',y',z')` | `P(Z_do(X=x,Y=y)=z, X=x', Y=y', Z=z')` |
//! | `cfx(x,z\|x',y',z')`, `cfy(y,z\|x',y',z')` | not identifiable, rejected |

use scm_marginal::confounded::{
    counterfactual_objective, joint_mass, q_index, qa_index, qb_index, response_weight_a, response_weight_b,
    ConfoundedInputs, CounterfactualQuery, STACKED_DIM,
};
use scm_marginal::rational::parse_rational;
use scm_marginal::{Error, Rational};

fn bits(args: &str, expected: usize, atom: &str) -> Result<Vec<u8>, Error> {
    let parts: Vec<&str> = args.split([',', '|']).map(str::trim).collect();
    if parts.len() != expected {
        return Err(Error::Parse(format!("{atom} takes {expected} arguments, got {}", parts.len())));
    }
    parts
        .iter()
        .map(|p| p.parse::<u8>().map_err(|_| Error::Parse(format!("{atom}: bad argument {p:?}"))))
        .collect()
}

fn check_range(values: &[u8], limits: &[u8], atom: &str) -> Result<(), Error> {
    for (v, l) in values.iter().zip(limits) {
        if v >= l {
            return Err(Error::Parse(format!("{atom}: argument {v} out of range")));
        }
    }
    Ok(())
}

fn atom_vector(atom: &str, inputs: &ConfoundedInputs) -> Result<Vec<Rational>, Error> {
    let atom = atom.trim();
    if atom == "mass" {
        return Ok(joint_mass());
    }
    let (name, rest) = atom
        .split_once('(')
        .ok_or_else(|| Error::Parse(format!("unknown objective atom {atom:?}")))?;
    let args = rest
        .strip_suffix(')')
        .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {atom:?}")))?;
    let unit = |idx: usize| {
        let mut v = vec![Rational::default(); STACKED_DIM];
        v[idx] = Rational::from_integer(1.into());
        v
    };
    let query = |q: CounterfactualQuery| counterfactual_objective(&q, inputs);
    match name.trim() {
        "qa" | "qb" => {
            let a = bits(args, 2, name)?;
            check_range(&a, &[2, 4], name)?;
            let idx = if name.trim() == "qa" { qa_index(a[0] as usize, a[1] as usize) } else { qb_index(a[0] as usize, a[1] as usize) };
            Ok(unit(idx))
        }
        "q" => {
            let a = bits(args, 3, name)?;
            check_range(&a, &[2, 2, 16], name)?;
            Ok(unit(q_index(a[0] as usize, a[1] as usize, a[2] as usize)))
        }
        "pa" | "pb" => {
            let a = bits(args, 1, name)?;
            check_range(&a, &[4], name)?;
            Ok(if name.trim() == "pa" { response_weight_a(a[0] as usize) } else { response_weight_b(a[0] as usize) })
        }
        "cfa" => {
            let a = bits(args, 4, name)?;
            check_range(&a, &[2; 4], name)?;
            query(CounterfactualQuery::MarginalA { x: a[0], z: a[1], x_obs: a[2], z_obs: a[3] })
        }
        "cfb" => {
            let a = bits(args, 4, name)?;
            check_range(&a, &[2; 4], name)?;
            query(CounterfactualQuery::MarginalB { y: a[0], z: a[1], y_obs: a[2], z_obs: a[3] })
        }
        "cfc" => {
            let a = bits(args, 6, name)?;
            check_range(&a, &[2; 6], name)?;
            query(CounterfactualQuery::JointC { x: a[0], y: a[1], z: a[2], x_obs: a[3], y_obs: a[4], z_obs: a[5] })
        }
        "cfx" => {
            let a = bits(args, 5, name)?;
            check_range(&a, &[2; 5], name)?;
            query(CounterfactualQuery::SingleGivenBothA { x: a[0], z: a[1], x_obs: a[2], y_obs: a[3], z_obs: a[4] })
        }
        "cfy" => {
            let a = bits(args, 5, name)?;
            check_range(&a, &[2; 5], name)?;
            query(CounterfactualQuery::SingleGivenBothB { y: a[0], z: a[1], x_obs: a[2], y_obs: a[3], z_obs: a[4] })
        }
        other => Err(Error::Parse(format!("unknown objective atom {other:?}"))),
    }
}

/// Splits at top-level `+`/`-`, keeping the sign with each term.
fn terms(spec: &str) -> Result<Vec<(bool, String)>, Error> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut negative = false;
    let mut current = String::new();
    for ch in spec.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse(format!("unbalanced parentheses in {spec:?}")));
        }
        if depth == 0 && (ch == '+' || ch == '-') && !current.trim().ends_with('*') {
            if !current.trim().is_empty() {
                out.push((negative, current.trim().to_string()));
            }
            negative = ch == '-';
            current.clear();
        } else {
            current.push(ch);
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in {spec:?}")));
    }
    if current.trim().is_empty() {
        return Err(Error::Parse(format!("empty term in objective {spec:?}")));
    }
    out.push((negative, current.trim().to_string()));
    Ok(out)
}

/// Parses an objective into a vector over the stacked LP variable.
pub fn parse_objective(spec: &str, inputs: &ConfoundedInputs) -> Result<Vec<Rational>, Error> {
    let mut total = vec![Rational::default(); STACKED_DIM];
    for (negative, term) in terms(spec)? {
        let (coef, atom) = match term.split_once('*') {
            Some((c, a)) => (parse_rational(c.trim())?, a),
            None => (Rational::from_integer(1.into()), term.as_str()),
        };
        let coef = if negative { -coef } else { coef };
        for (t, v) in total.iter_mut().zip(atom_vector(atom, inputs)?) {
            *t += &coef * v;
        }
    }
    Ok(total)
}
