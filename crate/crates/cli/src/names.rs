//! Named functions accepted on the command line, translated to expressions.
//!
//! Anything that is not a registered name is passed through as an
//! expression, so `expand "th00^4 - th01^4"` works as well as `expand eta`.

use theta_orbits::spaces::Generator;
use theta_orbits::Error;

fn numbers(list: &str) -> Option<Vec<u64>> {
    list.split(',').map(|x| x.trim().parse().ok()).collect()
}

/// "trN_a_b_c_d" as the trace operator expression.
pub fn trace_id(id: &str) -> Option<String> {
    let rest = id.strip_prefix("tr")?;
    let parts: Vec<u32> = rest
        .split('_')
        .map(|x| x.parse().ok())
        .collect::<Option<_>>()?;
    match parts.as_slice() {
        [n, a, b, c, d] => Some(format!("tr[{n};{a},{b},{c},{d}]")),
        _ => None,
    }
}

/// The expression for a command-line name.
pub fn resolve(name: &str) -> Result<String, Error> {
    let name = name.trim();
    if name.is_empty() {
        return Err(Error::Parse("empty name".into()));
    }
    if let Some(p) = name.strip_prefix("E2,1,p=") {
        let p: u64 = p
            .parse()
            .map_err(|_| Error::Parse(format!("bad prime in '{name}'")))?;
        return Ok(format!("E21p[{p}]"));
    }
    if let Some(args) = name.strip_prefix('E').and_then(numbers) {
        return match args.as_slice() {
            [_] => Ok(name.to_string()),
            [k, m] => Ok(format!("E[{k},{m}]")),
            _ => Err(Error::Parse(format!("bad Eisenstein name '{name}'"))),
        };
    }
    if let Some(args) = name
        .strip_prefix("theta_ab(")
        .and_then(|r| r.strip_suffix(')'))
    {
        return match args.split(',').collect::<Vec<_>>().as_slice() {
            [a, b] => Ok(format!("v[{},{}]", a.trim(), b.trim())),
            _ => Err(Error::Parse(format!(
                "theta_ab takes two characteristics, got '{name}'"
            ))),
        };
    }
    match name {
        "theta" => return Ok("v".into()),
        "theta00" | "theta01" | "theta10" => return Ok(format!("v{}", &name[5..])),
        _ => {}
    }
    if name.starts_with("phi") {
        if let Ok(g) = Generator::from_name(name) {
            return Ok(g.name().into());
        }
    }
    if let Some(expr) = trace_id(name) {
        return Ok(expr);
    }
    Ok(name.to_string())
}
