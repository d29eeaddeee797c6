//! Points files: one point per line as whitespace-separated `re,im` pairs.
//! Blank lines separate configurations; `#` lines are comments.

use num_complex::Complex64;
use zerocorr::PointConfiguration;

use crate::error::{CliError, CliResult};

fn parse_pair(token: &str, line: usize) -> CliResult<Complex64> {
    let bad = || CliError::Usage(format!("points line {line}: expected re,im but found {token:?}"));
    let (re, im) = token.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

pub fn parse_configurations(text: &str) -> CliResult<Vec<PointConfiguration>> {
    let mut configs = Vec::new();
    let mut current: Vec<Vec<Complex64>> = Vec::new();
    let flush = |current: &mut Vec<Vec<Complex64>>, configs: &mut Vec<PointConfiguration>| -> CliResult<()> {
        if !current.is_empty() {
            configs.push(PointConfiguration::new(std::mem::take(current))?);
        }
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            flush(&mut current, &mut configs)?;
            continue;
        }
        let point = line.split_whitespace().map(|t| parse_pair(t, i + 1)).collect::<CliResult<Vec<_>>>()?;
        current.push(point);
    }
    flush(&mut current, &mut configs)?;
    if configs.is_empty() {
        return Err(CliError::Usage("points file contains no points".into()));
    }
    Ok(configs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_families() {
        let text = "# two configurations\n0,0 1,0\n0.5,-1 2,2\n\n\n3,0 0,0\n1,1 0,0\n";
        let c = parse_configurations(text).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].n(), c[0].m()), (2, 2));
        assert_eq!(c[1].point(1)[0], Complex64::new(1.0, 1.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_configurations("1;2").is_err());
        assert!(parse_configurations("# nothing\n").is_err());
        assert!(parse_configurations("0,0\n0,0\n").is_err());
        assert!(parse_configurations("0,0\n1,0 2,0\n").is_err());
    }
}
