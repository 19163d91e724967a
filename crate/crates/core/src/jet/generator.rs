use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{jet_order, JetSpace};

/// Infinitesimal generator `xi^j d/dx_j + eta^i d/du^i`.
///
/// `xi` is indexed by independent variable, `eta` by dependent variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub xi: Vec<Expr>,
    pub eta: Vec<Expr>,
}

impl Generator {
    pub fn zero(space: &JetSpace) -> Self {
        Generator { xi: vec![Expr::zero(); space.n_independents()], eta: vec![Expr::zero(); space.n_dependents()] }
    }

    pub fn new(xi: Vec<Expr>, eta: Vec<Expr>, space: &JetSpace) -> Result<Self> {
        if xi.len() != space.n_independents() || eta.len() != space.n_dependents() {
            return Err(Error::InvalidSpace(format!(
                "generator has {} xi and {} eta coefficients, the space has {} independents and {} dependents",
                xi.len(),
                eta.len(),
                space.n_independents(),
                space.n_dependents()
            )));
        }
        Ok(Generator { xi, eta })
    }

    /// Highest jet order appearing in any coefficient; 0 for point generators.
    pub fn dependence_order(&self, space: &JetSpace) -> u32 {
        self.coefficients().map(|e| jet_order(e, space)).max().unwrap_or(0)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &Expr> {
        self.xi.iter().chain(self.eta.iter())
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients().all(Expr::is_zero)
    }

    pub fn scale(&self, c: &crate::expr::Rational) -> Generator {
        Generator { xi: self.xi.iter().map(|e| e.scale(c)).collect(), eta: self.eta.iter().map(|e| e.scale(c)).collect() }
    }

    pub fn add(&self, other: &Generator) -> Generator {
        Generator {
            xi: self.xi.iter().zip(&other.xi).map(|(a, b)| a + b).collect(),
            eta: self.eta.iter().zip(&other.eta).map(|(a, b)| a + b).collect(),
        }
    }

    /// Human-readable operator form, e.g. `x^2*D[x] + x*y*D[y]`.
    pub fn describe(&self, space: &JetSpace) -> String {
        let mut parts = Vec::new();
        let names = space.independents().iter().chain(space.dependents());
        for (coeff, name) in self.coefficients().zip(names) {
            if coeff.is_zero() {
                continue;
            }
            let c = coeff.to_string_in(space);
            let (negative, c) = match c.strip_prefix('-') {
                Some(rest) if coeff.len() == 1 => (true, rest.to_string()),
                _ => (false, c),
            };
            let term = if coeff.len() > 1 {
                format!("({c})*D[{name}]")
            } else if c == "1" {
                format!("D[{name}]")
            } else {
                format!("{c}*D[{name}]")
            };
            parts.push((negative, term));
        }
        let mut out = String::new();
        for (k, (negative, term)) in parts.iter().enumerate() {
            match (k, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            out.push_str(term);
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }
}

/// Boyer's equivalent generator with vanishing `xi`:
/// `eta_bar^i = eta^i - u^i_j xi^j`.
pub fn evolutionary_form(g: &Generator, space: &JetSpace) -> Result<Generator> {
    let needed = g.dependence_order(space) + 1;
    if needed > space.max_order() {
        return Err(Error::HeadroomExhausted { needed, max: space.max_order() });
    }
    let n = space.n_independents();
    let eta = g
        .eta
        .iter()
        .enumerate()
        .map(|(i, eta)| {
            let mut out = eta.clone();
            for (j, xi) in g.xi.iter().enumerate() {
                let mut multi = vec![0; n];
                multi[j] = 1;
                let uij = space.jet(i, &multi).expect("first-order jets are always registered");
                out -= &(&Expr::var(uij) * xi);
            }
            out
        })
        .collect();
    Ok(Generator { xi: vec![Expr::zero(); n], eta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn gen(s: &JetSpace, xi: &[&str], eta: &[&str]) -> Generator {
        let p = |t: &&str| parse(t, s).unwrap();
        Generator::new(xi.iter().map(p).collect(), eta.iter().map(p).collect(), s).unwrap()
    }

    #[test]
    fn evolutionary_examples() {
        let q = JetSpace::new(&["t"], &["q"], 3).unwrap();
        let ev = evolutionary_form(&gen(&q, &["1"], &["0"]), &q).unwrap();
        assert_eq!(ev, gen(&q, &["0"], &["-q'"]));

        let u = JetSpace::new(&["t", "x"], &["u"], 3).unwrap();
        let g = gen(&u, &["0", "0"], &["1"]);
        assert_eq!(evolutionary_form(&g, &u).unwrap(), g);

        let y = JetSpace::new(&["x"], &["y"], 3).unwrap();
        let ev = evolutionary_form(&gen(&y, &["x"], &["1/2*y"]), &y).unwrap();
        assert_eq!(ev, gen(&y, &["0"], &["1/2*y - x*y'"]));
        assert_eq!(ev.dependence_order(&y), 1);
    }

    #[test]
    fn headroom_for_evolutionary_form() {
        let y = JetSpace::new(&["x"], &["y"], 2).unwrap();
        let g = gen(&y, &["y''"], &["0"]);
        assert!(evolutionary_form(&g, &y).is_err());
    }

    #[test]
    fn describe_operator() {
        let y = JetSpace::new(&["x"], &["y"], 2).unwrap();
        assert_eq!(gen(&y, &["x^2"], &["x*y"]).describe(&y), "x^2*D[x] + x*y*D[y]");
        assert_eq!(gen(&y, &["0"], &["1"]).describe(&y), "D[y]");
        assert_eq!(gen(&y, &["0"], &["1/2*y - x*y'"]).describe(&y), "(-x*y' + 1/2*y)*D[y]");
        assert_eq!(gen(&y, &["-1"], &["-3*x"]).describe(&y), "-D[x] - 3*x*D[y]");
    }
}
