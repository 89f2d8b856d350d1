//! Finite logical matrices and the brute-force consequence oracle.

mod oracle;

use std::fmt;
use std::str::FromStr;

pub use oracle::{eval, holds, holds_sequent, Compiled, Valuation};

pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("unknown logic '{0}'")]
    UnknownLogic(String),
    #[error("no binding for atom '{0}'")]
    Unbound(String),
    #[error("information order is only defined for B4, K3 and LP3, not {0}")]
    Unsupported(String),
}

/// A finite De Morgan lattice with a set of designated values.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    pub name: String,
    pub elements: Vec<String>,
    pub meet: Vec<Vec<Elem>>,
    pub join: Vec<Vec<Elem>>,
    pub neg: Vec<Elem>,
    pub top: Elem,
    pub bot: Elem,
    pub designated: Vec<bool>,
}

impl Matrix {
    /// Build a matrix from a lattice order given as `leq(x, y)`.
    fn from_order(
        name: &str,
        elements: &[&str],
        leq: impl Fn(Elem, Elem) -> bool,
        neg: &[Elem],
        designated: &[Elem],
    ) -> Matrix {
        let n = elements.len();
        let lub = |x: Elem, y: Elem| {
            (0..n)
                .filter(|&z| leq(x, z) && leq(y, z))
                .find(|&z| (0..n).all(|w| !(leq(x, w) && leq(y, w)) || leq(z, w)))
                .expect("lattice order has joins")
        };
        let glb = |x: Elem, y: Elem| {
            (0..n)
                .filter(|&z| leq(z, x) && leq(z, y))
                .find(|&z| (0..n).all(|w| !(leq(w, x) && leq(w, y)) || leq(w, z)))
                .expect("lattice order has meets")
        };
        let top = (0..n).find(|&z| (0..n).all(|w| leq(w, z))).expect("top");
        let bot = (0..n).find(|&z| (0..n).all(|w| leq(z, w))).expect("bottom");
        Matrix {
            name: name.to_string(),
            elements: elements.iter().map(|s| s.to_string()).collect(),
            meet: (0..n).map(|x| (0..n).map(|y| glb(x, y)).collect()).collect(),
            join: (0..n).map(|x| (0..n).map(|y| lub(x, y)).collect()).collect(),
            neg: neg.to_vec(),
            top,
            bot,
            designated: (0..n).map(|x| designated.contains(&x)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, name: &str) -> Option<Elem> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn is_designated(&self, x: Elem) -> bool {
        self.designated[x]
    }

    pub fn designated_names(&self) -> Vec<&str> {
        (0..self.size()).filter(|&x| self.designated[x]).map(|x| self.elements[x].as_str()).collect()
    }

    /// Lattice order induced by the meet table.
    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.meet[x][y] == x
    }

    /// Check totality, the lattice laws, distributivity and the De Morgan laws.
    pub fn check_laws(&self) -> Result<(), String> {
        let n = self.size();
        let all = || (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)));
        if self.meet.len() != n || self.join.len() != n || self.neg.len() != n || self.designated.len() != n {
            return Err("tables are not total".into());
        }
        for (x, y) in all() {
            let (m, j) = (self.meet[x][y], self.join[x][y]);
            if m >= n || j >= n {
                return Err(format!("table entry out of range at ({x},{y})"));
            }
            if m != self.meet[y][x] || j != self.join[y][x] {
                return Err(format!("not commutative at ({x},{y})"));
            }
            if self.meet[x][j] != x || self.join[x][m] != x {
                return Err(format!("not absorptive at ({x},{y})"));
            }
            if self.neg[m] != self.join[self.neg[x]][self.neg[y]] {
                return Err(format!("De Morgan law fails at ({x},{y})"));
            }
            for z in 0..n {
                if self.meet[m][z] != self.meet[x][self.meet[y][z]] || self.join[j][z] != self.join[x][self.join[y][z]] {
                    return Err(format!("not associative at ({x},{y},{z})"));
                }
                if self.meet[x][self.join[y][z]] != self.join[m][self.meet[x][z]] {
                    return Err(format!("not distributive at ({x},{y},{z})"));
                }
            }
        }
        for x in 0..n {
            if self.neg[self.neg[x]] != x {
                return Err(format!("negation is not involutive at {x}"));
            }
            if self.meet[x][self.top] != x || self.join[x][self.bot] != x {
                return Err("top or bottom is not extremal".into());
            }
        }
        Ok(())
    }

    /// One line per table row, using element names.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let names = |row: &[Elem]| row.iter().map(|&e| self.elements[e].as_str()).collect::<Vec<_>>().join(" ");
        out.push_str(&format!("matrix {}\n", self.name));
        out.push_str(&format!("elements {}\n", self.elements.join(" ")));
        out.push_str(&format!("designated {}\n", self.designated_names().join(" ")));
        out.push_str(&format!("neg {}\n", names(&self.neg)));
        for (x, row) in self.meet.iter().enumerate() {
            out.push_str(&format!("meet {} : {}\n", self.elements[x], names(row)));
        }
        for (x, row) in self.join.iter().enumerate() {
            out.push_str(&format!("join {} : {}\n", self.elements[x], names(row)));
        }
        out
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix({})", self.name)
    }
}

const F: Elem = 0;
const N: Elem = 1;
const B: Elem = 2;
const T: Elem = 3;

fn belnap_order(x: Elem, y: Elem) -> bool {
    x == y || x == F || y == T
}

fn b4_algebra(name: &str, designated: &[Elem]) -> Matrix {
    Matrix::from_order(name, &["f", "n", "b", "t"], belnap_order, &[T, N, B, F], designated)
}

pub fn b4() -> Matrix {
    b4_algebra("B4", &[B, T])
}

pub fn etl4() -> Matrix {
    b4_algebra("ETL4", &[T])
}

pub fn k3() -> Matrix {
    Matrix::from_order("K3", &["f", "n", "t"], |x, y| x <= y, &[2, 1, 0], &[2])
}

pub fn lp3() -> Matrix {
    Matrix::from_order("LP3", &["f", "b", "t"], |x, y| x <= y, &[2, 1, 0], &[1, 2])
}

pub fn bool2() -> Matrix {
    Matrix::from_order("BOOL2", &["0", "1"], |x, y| x <= y, &[1, 0], &[1])
}

/// Componentwise product; designated values are pairs of designated values.
pub fn product_matrix(a: &Matrix, b: &Matrix) -> Matrix {
    let (na, nb) = (a.size(), b.size());
    let idx = |x: Elem, y: Elem| x * nb + y;
    let split = |z: Elem| (z / nb, z % nb);
    let n = na * nb;
    let binary = |ta: &Vec<Vec<Elem>>, tb: &Vec<Vec<Elem>>| -> Vec<Vec<Elem>> {
        (0..n)
            .map(|u| {
                let (x1, y1) = split(u);
                (0..n)
                    .map(|v| {
                        let (x2, y2) = split(v);
                        idx(ta[x1][x2], tb[y1][y2])
                    })
                    .collect()
            })
            .collect()
    };
    Matrix {
        name: format!("{}x{}", a.name, b.name),
        elements: (0..n).map(|z| format!("({},{})", a.elements[split(z).0], b.elements[split(z).1])).collect(),
        meet: binary(&a.meet, &b.meet),
        join: binary(&a.join, &b.join),
        neg: (0..n).map(|z| idx(a.neg[split(z).0], b.neg[split(z).1])).collect(),
        top: idx(a.top, b.top),
        bot: idx(a.bot, b.bot),
        designated: (0..n).map(|z| a.designated[split(z).0] && b.designated[split(z).1]).collect(),
    }
}

/// The information order of B4, K3 or LP3 as a `leq` table.
pub fn information_order(m: &Matrix) -> Result<Vec<Vec<bool>>, SemanticsError> {
    let names: &[(&str, &str)] = match m.name.as_str() {
        "B4" => &[("n", "f"), ("n", "t"), ("f", "b"), ("t", "b"), ("n", "b")],
        "K3" => &[("n", "f"), ("n", "t")],
        "LP3" => &[("f", "b"), ("t", "b")],
        other => return Err(SemanticsError::Unsupported(other.to_string())),
    };
    let n = m.size();
    let mut table = vec![vec![false; n]; n];
    for (x, row) in table.iter_mut().enumerate() {
        row[x] = true;
    }
    for (lo, hi) in names {
        let (lo, hi) = (m.element(lo).expect("element"), m.element(hi).expect("element"));
        table[lo][hi] = true;
    }
    Ok(table)
}

/// Whether every operation is monotone in the information order.
pub fn check_info_monotone(m: &Matrix) -> Result<bool, SemanticsError> {
    let le = information_order(m)?;
    let n = m.size();
    for x in 0..n {
        for x2 in 0..n {
            if !le[x][x2] {
                continue;
            }
            if !le[m.neg[x]][m.neg[x2]] {
                return Ok(false);
            }
            for y in 0..n {
                for y2 in 0..n {
                    if le[y][y2] && (!le[m.meet[x][y]][m.meet[x2][y2]] || !le[m.join[x][y]][m.join[x2][y2]]) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// The builtin logics, by their command-line tokens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LogicName {
    B,
    K,
    LP,
    ETL,
    ECQ,
    CL,
    KLEQ,
}

impl LogicName {
    pub const ALL: [LogicName; 7] =
        [LogicName::B, LogicName::K, LogicName::LP, LogicName::ETL, LogicName::ECQ, LogicName::CL, LogicName::KLEQ];

    pub fn token(self) -> &'static str {
        match self {
            LogicName::B => "b",
            LogicName::K => "k",
            LogicName::LP => "lp",
            LogicName::ETL => "etl",
            LogicName::ECQ => "ecq",
            LogicName::CL => "cl",
            LogicName::KLEQ => "kleq",
        }
    }
}

impl fmt::Display for LogicName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token().to_uppercase())
    }
}

impl FromStr for LogicName {
    type Err = SemanticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LogicName::ALL
            .into_iter()
            .find(|l| l.token().eq_ignore_ascii_case(s))
            .ok_or_else(|| SemanticsError::UnknownLogic(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LogicSpec {
    Single(Matrix),
    Intersection(Vec<LogicSpec>),
}

impl LogicSpec {
    pub fn matrices(&self) -> Vec<&Matrix> {
        match self {
            LogicSpec::Single(m) => vec![m],
            LogicSpec::Intersection(parts) => parts.iter().flat_map(|p| p.matrices()).collect(),
        }
    }
}

pub fn builtin(name: LogicName) -> LogicSpec {
    match name {
        LogicName::B => LogicSpec::Single(b4()),
        LogicName::K => LogicSpec::Single(k3()),
        LogicName::LP => LogicSpec::Single(lp3()),
        LogicName::ETL => LogicSpec::Single(etl4()),
        LogicName::ECQ => LogicSpec::Single(product_matrix(&etl4(), &b4())),
        LogicName::CL => LogicSpec::Single(bool2()),
        LogicName::KLEQ => LogicSpec::Intersection(vec![builtin(LogicName::K), builtin(LogicName::LP)]),
    }
}
