//! Finite-alphabet probability arithmetic.
//!
//! Everything is measured in bits. Tables are dense and row-major, with the
//! last variable varying fastest.

use serde::{Deserialize, Serialize};

use crate::error::{domain, resource, Result};

/// Largest number of cells a dense table may hold unless a caller opts in to more.
pub const DEFAULT_CELL_CAP: usize = 1 << 24;

/// Normalization tolerance for tables built in-process.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Probabilities below this contribute nothing to entropy sums.
pub const ZERO_CUTOFF: f64 = 1e-15;

/// A named finite alphabet `{0, .., size-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    pub name: String,
    pub size: usize,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, size: usize) -> Result<Self> {
        let name = name.into();
        if size == 0 {
            return domain(format!("alphabet {name} must have at least one symbol"));
        }
        Ok(Alphabet { name, size })
    }
}

/// Number of cells of the product alphabet, or a resource error past `cap`.
pub fn product_size(alphabets: &[Alphabet], cap: usize) -> Result<usize> {
    let mut cells: usize = 1;
    for a in alphabets {
        cells = match cells.checked_mul(a.size) {
            Some(c) if c <= cap => c,
            _ => {
                return resource(format!(
                    "product alphabet over {:?} exceeds {cap} cells",
                    alphabets.iter().map(|a| a.name.as_str()).collect::<Vec<_>>()
                ))
            }
        };
    }
    Ok(cells)
}

/// Flat index -> per-coordinate digits (last coordinate fastest).
pub fn unravel(mut flat: usize, sizes: &[usize], digits: &mut [usize]) {
    for k in (0..sizes.len()).rev() {
        digits[k] = flat % sizes[k];
        flat /= sizes[k];
    }
}

/// Per-coordinate digits -> flat index (last coordinate fastest).
pub fn ravel(digits: &[usize], sizes: &[usize]) -> usize {
    digits
        .iter()
        .zip(sizes)
        .fold(0, |acc, (&d, &s)| acc * s + d)
}

fn check_unique(vars: &[Alphabet]) -> Result<()> {
    for (i, a) in vars.iter().enumerate() {
        if vars[..i].iter().any(|b| b.name == a.name) {
            return domain(format!("duplicate variable label {}", a.name));
        }
    }
    Ok(())
}

fn check_entries(probs: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &p in probs {
        if !(p >= 0.0) || !p.is_finite() {
            return domain(format!("invalid probability entry {p}"));
        }
        total += p;
    }
    Ok(total)
}

/// A normalized joint distribution over an ordered list of named variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    vars: Vec<Alphabet>,
    probs: Vec<f64>,
}

impl JointTable {
    /// Builds a table, checking shape and normalization to [`NORMALIZATION_TOL`].
    pub fn new(vars: Vec<Alphabet>, probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(vars, probs, NORMALIZATION_TOL)
    }

    /// Like [`JointTable::new`] with a caller-chosen normalization tolerance.
    /// The stored table is renormalized exactly.
    pub fn with_tolerance(vars: Vec<Alphabet>, mut probs: Vec<f64>, tol: f64) -> Result<Self> {
        check_unique(&vars)?;
        let cells = product_size(&vars, DEFAULT_CELL_CAP)?;
        if cells != probs.len() {
            return domain(format!(
                "table has {} entries but the variables span {cells} cells",
                probs.len()
            ));
        }
        let total = check_entries(&probs)?;
        if (total - 1.0).abs() > tol {
            return domain(format!("table sums to {total}, not 1"));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(JointTable { vars, probs })
    }

    /// Normalizes arbitrary nonnegative weights (counts, unnormalized masses).
    pub fn from_weights(vars: Vec<Alphabet>, mut weights: Vec<f64>) -> Result<Self> {
        check_unique(&vars)?;
        let cells = product_size(&vars, DEFAULT_CELL_CAP)?;
        if cells != weights.len() {
            return domain("weight vector does not match the variable shape");
        }
        let total = check_entries(&weights)?;
        if total <= 0.0 {
            return domain("weights sum to zero");
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(JointTable {
            vars,
            probs: weights,
        })
    }

    /// Single-variable distribution.
    pub fn distribution(name: &str, probs: Vec<f64>) -> Result<Self> {
        let a = Alphabet::new(name, probs.len())?;
        Self::new(vec![a], probs)
    }

    /// Uniform distribution over the product of `vars`.
    pub fn uniform(vars: Vec<Alphabet>) -> Result<Self> {
        let cells = product_size(&vars, DEFAULT_CELL_CAP)?;
        Self::new(vars, vec![1.0 / cells as f64; cells])
    }

    pub fn vars(&self) -> &[Alphabet] {
        &self.vars
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.vars.iter().map(|a| a.size).collect()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|a| a.name == name)
            .map_or_else(|| domain(format!("unknown variable label {name}")), Ok)
    }

    fn axes(&self, names: &[&str]) -> Result<Vec<usize>> {
        let axes = names
            .iter()
            .map(|n| self.index_of(n))
            .collect::<Result<Vec<_>>>()?;
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].contains(a) {
                return domain(format!("variable {} listed twice", names[i]));
            }
        }
        Ok(axes)
    }

    /// Probability at the given per-variable digits.
    pub fn get(&self, digits: &[usize]) -> f64 {
        self.probs[ravel(digits, &self.sizes())]
    }

    fn marginal_axes(&self, axes: &[usize]) -> Vec<f64> {
        let sizes = self.sizes();
        let mut coef = vec![0usize; sizes.len()];
        let mut stride = 1;
        for &a in axes.iter().rev() {
            coef[a] = stride;
            stride *= sizes[a];
        }
        let mut out = vec![0.0; stride];
        let mut digits = vec![0usize; sizes.len()];
        let mut target = 0usize;
        for &p in &self.probs {
            out[target] += p;
            for k in (0..sizes.len()).rev() {
                digits[k] += 1;
                target += coef[k];
                if digits[k] < sizes[k] {
                    break;
                }
                target -= coef[k] * sizes[k];
                digits[k] = 0;
            }
        }
        out
    }

    /// Marginal on `names`, in the order given.
    pub fn marginal(&self, names: &[&str]) -> Result<JointTable> {
        let axes = self.axes(names)?;
        let probs = self.marginal_axes(&axes);
        Ok(JointTable {
            vars: axes.iter().map(|&a| self.vars[a].clone()).collect(),
            probs,
        })
    }

    /// H(names) in bits.
    pub fn entropy(&self, names: &[&str]) -> Result<f64> {
        let axes = self.axes(names)?;
        Ok(entropy_of(&self.marginal_axes(&axes)))
    }

    /// H(vars | given) in bits.
    pub fn conditional_entropy(&self, vars: &[&str], given: &[&str]) -> Result<f64> {
        let joint: Vec<&str> = given.iter().chain(vars).copied().collect();
        let h_joint = self.entropy(&joint)?;
        let h_given = self.entropy(given)?;
        Ok(h_joint - h_given)
    }

    /// I(a; b | given) in bits, clipped below at zero.
    pub fn mutual_information(&self, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
        for x in a {
            if b.contains(x) || given.contains(x) {
                return domain(format!("variable {x} appears in more than one argument"));
            }
        }
        for x in b {
            if given.contains(x) {
                return domain(format!("variable {x} appears in more than one argument"));
            }
        }
        let ac: Vec<&str> = a.iter().chain(given).copied().collect();
        let bc: Vec<&str> = b.iter().chain(given).copied().collect();
        let abc: Vec<&str> = a.iter().chain(b).chain(given).copied().collect();
        let value = self.entropy(&ac)? + self.entropy(&bc)?
            - self.entropy(&abc)?
            - self.entropy(given)?;
        Ok(value.max(0.0))
    }

    /// Appends the outputs of `kernel`, fed by the variables `on` (matched to
    /// the kernel inputs in order).
    pub fn apply_kernel(&self, on: &[&str], kernel: &Kernel) -> Result<JointTable> {
        let axes = self.axes(on)?;
        if axes.len() != kernel.inputs.len()
            || axes
                .iter()
                .zip(&kernel.inputs)
                .any(|(&a, k)| self.vars[a].size != k.size)
        {
            return domain("kernel inputs do not match the selected variables");
        }
        let mut vars = self.vars.clone();
        vars.extend(kernel.outputs.iter().cloned());
        check_unique(&vars)?;
        let out_cells = kernel.output_cells();
        product_size(&vars, DEFAULT_CELL_CAP)?;
        let sizes = self.sizes();
        let in_sizes: Vec<usize> = kernel.inputs.iter().map(|a| a.size).collect();
        let mut digits = vec![0usize; sizes.len()];
        let mut in_digits = vec![0usize; axes.len()];
        let mut probs = Vec::with_capacity(self.probs.len() * out_cells);
        for (flat, &p) in self.probs.iter().enumerate() {
            unravel(flat, &sizes, &mut digits);
            for (d, &a) in in_digits.iter_mut().zip(&axes) {
                *d = digits[a];
            }
            let row = kernel.row(ravel(&in_digits, &in_sizes));
            probs.extend(row.iter().map(|q| p * q));
        }
        Ok(JointTable { vars, probs })
    }

    /// Relabels one variable through a deterministic map into an alphabet of
    /// `new_size` symbols (merging cells when the map is not injective).
    pub fn map_variable(
        &self,
        name: &str,
        new_size: usize,
        f: impl Fn(usize) -> usize,
    ) -> Result<JointTable> {
        let axis = self.index_of(name)?;
        let mut vars = self.vars.clone();
        vars[axis] = Alphabet::new(name, new_size)?;
        let new_sizes: Vec<usize> = vars.iter().map(|a| a.size).collect();
        let cells = product_size(&vars, DEFAULT_CELL_CAP)?;
        let sizes = self.sizes();
        let mut digits = vec![0usize; sizes.len()];
        let mut probs = vec![0.0; cells];
        for (flat, &p) in self.probs.iter().enumerate() {
            unravel(flat, &sizes, &mut digits);
            let image = f(digits[axis]);
            if image >= new_size {
                return domain(format!("map sends {} outside [0, {new_size})", digits[axis]));
            }
            digits[axis] = image;
            probs[ravel(&digits, &new_sizes)] += p;
        }
        Ok(JointTable { vars, probs })
    }

    /// Merges several variables into one composite variable named `name`
    /// (digits of the merged variables in the given order, last fastest).
    pub fn merge(&self, names: &[&str], name: &str) -> Result<JointTable> {
        let axes = self.axes(names)?;
        let rest: Vec<usize> = (0..self.vars.len()).filter(|i| !axes.contains(i)).collect();
        let mut order = rest.clone();
        order.extend(&axes);
        let mut vars: Vec<Alphabet> = rest.iter().map(|&i| self.vars[i].clone()).collect();
        let merged_size = axes.iter().map(|&a| self.vars[a].size).product();
        vars.push(Alphabet::new(name, merged_size)?);
        check_unique(&vars)?;
        let probs = self.permuted(&order);
        Ok(JointTable { vars, probs })
    }

    fn permuted(&self, order: &[usize]) -> Vec<f64> {
        let sizes = self.sizes();
        let new_sizes: Vec<usize> = order.iter().map(|&i| sizes[i]).collect();
        let mut digits = vec![0usize; sizes.len()];
        let mut new_digits = vec![0usize; sizes.len()];
        let mut out = vec![0.0; self.probs.len()];
        for (flat, &p) in self.probs.iter().enumerate() {
            unravel(flat, &sizes, &mut digits);
            for (nd, &i) in new_digits.iter_mut().zip(order) {
                *nd = digits[i];
            }
            out[ravel(&new_digits, &new_sizes)] = p;
        }
        out
    }
}

/// Shannon entropy of a probability vector in bits.
pub fn entropy_of(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > ZERO_CUTOFF)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// D(p || q) in bits. Returns `f64::INFINITY` when p is not absolutely
/// continuous with respect to q.
pub fn kl_divergence(p: &JointTable, q: &JointTable) -> Result<f64> {
    if p.vars != q.vars {
        return domain("divergence needs identical variable lists");
    }
    Ok(kl_of(&p.probs, &q.probs))
}

pub(crate) fn kl_of(p: &[f64], q: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a <= ZERO_CUTOFF {
            continue;
        }
        if b <= 0.0 {
            return f64::INFINITY;
        }
        d += a * (a / b).log2();
    }
    d.max(0.0)
}

fn check_unit(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("{x} is not a probability"));
    }
    Ok(())
}

/// h(x) = -x log2 x - (1-x) log2 (1-x).
pub fn binary_entropy(x: f64) -> Result<f64> {
    check_unit(x)?;
    Ok(h2(x))
}

pub(crate) fn h2(x: f64) -> f64 {
    entropy_of(&[x, 1.0 - x])
}

/// x * y = x(1-y) + (1-x)y, the crossover of two cascaded binary symmetric channels.
pub fn star_convolve(x: f64, y: f64) -> Result<f64> {
    check_unit(x)?;
    check_unit(y)?;
    Ok(x * (1.0 - y) + (1.0 - x) * y)
}

/// Conditional distribution tables `p(outputs | inputs)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    inputs: Vec<Alphabet>,
    outputs: Vec<Alphabet>,
    probs: Vec<f64>,
}

impl Kernel {
    pub fn new(inputs: Vec<Alphabet>, outputs: Vec<Alphabet>, probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(inputs, outputs, probs, NORMALIZATION_TOL)
    }

    /// Validates each row to `tol` and renormalizes it exactly.
    pub fn with_tolerance(
        inputs: Vec<Alphabet>,
        outputs: Vec<Alphabet>,
        mut probs: Vec<f64>,
        tol: f64,
    ) -> Result<Self> {
        let mut all = inputs.clone();
        all.extend(outputs.iter().cloned());
        check_unique(&all)?;
        let rows = product_size(&inputs, DEFAULT_CELL_CAP)?;
        let cols = product_size(&outputs, DEFAULT_CELL_CAP)?;
        if rows.checked_mul(cols) != Some(probs.len()) {
            return domain(format!(
                "kernel has {} entries, expected {rows}x{cols}",
                probs.len()
            ));
        }
        for (r, row) in probs.chunks_mut(cols).enumerate() {
            let total = check_entries(row)?;
            if (total - 1.0).abs() > tol {
                return domain(format!("kernel row {r} sums to {total}, not 1"));
            }
            row.iter_mut().for_each(|p| *p /= total);
        }
        Ok(Kernel {
            inputs,
            outputs,
            probs,
        })
    }

    /// Builds a kernel by evaluating `f(input_digits, output_digits)`.
    pub fn from_fn(
        inputs: Vec<Alphabet>,
        outputs: Vec<Alphabet>,
        f: impl Fn(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let in_sizes: Vec<usize> = inputs.iter().map(|a| a.size).collect();
        let out_sizes: Vec<usize> = outputs.iter().map(|a| a.size).collect();
        let rows = product_size(&inputs, DEFAULT_CELL_CAP)?;
        let cols = product_size(&outputs, DEFAULT_CELL_CAP)?;
        let mut probs = Vec::with_capacity(rows * cols);
        let mut id = vec![0usize; in_sizes.len()];
        let mut od = vec![0usize; out_sizes.len()];
        for r in 0..rows {
            unravel(r, &in_sizes, &mut id);
            for c in 0..cols {
                unravel(c, &out_sizes, &mut od);
                probs.push(f(&id, &od));
            }
        }
        Self::with_tolerance(inputs, outputs, probs, 1e-9)
    }

    pub fn inputs(&self) -> &[Alphabet] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Alphabet] {
        &self.outputs
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn input_cells(&self) -> usize {
        self.inputs.iter().map(|a| a.size).product()
    }

    pub fn output_cells(&self) -> usize {
        self.outputs.iter().map(|a| a.size).product()
    }

    /// Output distribution for one flat input index.
    pub fn row(&self, input: usize) -> &[f64] {
        let cols = self.output_cells();
        &self.probs[input * cols..(input + 1) * cols]
    }
}
