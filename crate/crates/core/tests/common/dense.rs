//! Dense state-vector reference simulator for a handful of qubits.
//!
//! Qubit `q` is bit `q` of the basis index. Clifford operations are turned
//! into unitaries from their Pauli images alone, so this module shares no
//! arithmetic with the tableau code it checks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use qrpm::{CliffordOperation, Pauli, PauliString};

pub fn pauli_1q(p: Pauli) -> DMatrix<C> {
    let (o, l, i) = (C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 1.0));
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    }
}

/// Full matrix of a signed Pauli string; qubit 0 is the least significant.
pub fn pauli_matrix(p: &PauliString) -> DMatrix<C> {
    let mut m = DMatrix::from_element(1, 1, C::new(1.0, 0.0));
    for q in 0..p.len() {
        m = pauli_1q(p.get(q)).kronecker(&m);
    }
    if p.is_negative() {
        m *= C::new(-1.0, 0.0);
    }
    m
}

fn image(op: &CliffordOperation, row: usize) -> PauliString {
    let k = op.width();
    let m = op.symplectic_matrix();
    let mut p = PauliString::identity(k);
    for q in 0..k {
        p.set(q, Pauli::from_bits(m.get(row, q), m.get(row, k + q)));
    }
    p.set_negative(op.phase_bits()[row]);
    p
}

/// Unitary (up to global phase) with `U X_q U† = x-image` and
/// `U Z_q U† = z-image`.
pub fn clifford_unitary(op: &CliffordOperation) -> DMatrix<C> {
    let k = op.width();
    let d = 1usize << k;
    let xs: Vec<DMatrix<C>> = (0..k).map(|q| pauli_matrix(&image(op, q))).collect();
    let zs: Vec<DMatrix<C>> = (0..k).map(|q| pauli_matrix(&image(op, k + q))).collect();
    let id = DMatrix::<C>::identity(d, d);
    let mut proj = id.clone();
    for z in &zs {
        proj = (&id + z) * C::new(0.5, 0.0) * proj;
    }
    // The projector has rank one; any column with weight spans U|0>.
    let col = (0..d).max_by(|&a, &b| proj.column(a).norm().total_cmp(&proj.column(b).norm())).unwrap();
    let psi0: DVector<C> = proj.column(col).into_owned().normalize();
    let mut u = DMatrix::<C>::zeros(d, d);
    for b in 0..d {
        let mut v = psi0.clone();
        for (q, x) in xs.iter().enumerate() {
            if b >> q & 1 == 1 {
                v = x * v;
            }
        }
        u.set_column(b, &v);
    }
    u
}

#[derive(Clone, Debug)]
pub struct DenseState {
    pub n: usize,
    pub amps: DVector<C>,
}

impl DenseState {
    pub fn zero(n: usize) -> Self {
        let mut amps = DVector::from_element(1 << n, C::new(0.0, 0.0));
        amps[0] = C::new(1.0, 0.0);
        Self { n, amps }
    }

    /// Applies a `k`-qubit unitary to qubits `start..start + k`.
    pub fn apply(&mut self, u: &DMatrix<C>, start: usize) {
        let k = (u.nrows() as f64).log2() as usize;
        let mask = ((1usize << k) - 1) << start;
        let mut out = DVector::from_element(self.amps.len(), C::new(0.0, 0.0));
        for idx in 0..self.amps.len() {
            let a = self.amps[idx];
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let local = (idx & mask) >> start;
            let rest = idx & !mask;
            for r in 0..(1usize << k) {
                out[rest | (r << start)] += u[(r, local)] * a;
            }
        }
        self.amps = out;
    }

    pub fn prob_one(&self, q: usize) -> f64 {
        self.amps.iter().enumerate().filter(|(i, _)| i >> q & 1 == 1).map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn project(&mut self, q: usize, value: u8) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i >> q & 1) as u8 != value {
                *a = C::new(0.0, 0.0);
            }
        }
        let norm = self.amps.norm();
        self.amps /= C::new(norm, 0.0);
    }

    /// `<ψ|P|ψ>` for a signed Pauli string.
    pub fn expectation(&self, p: &PauliString) -> f64 {
        let m = pauli_matrix(p);
        (self.amps.adjoint() * m * &self.amps)[(0, 0)].re
    }

    /// Von Neumann entropy (bits) of the reduced state on `subset`.
    pub fn entropy(&self, subset: &[usize]) -> f64 {
        let inside: Vec<usize> = (0..self.n).filter(|q| subset.contains(q)).collect();
        let outside: Vec<usize> = (0..self.n).filter(|q| !subset.contains(q)).collect();
        if inside.is_empty() || outside.is_empty() {
            return 0.0;
        }
        // Work on the smaller side: S_A = S_{A^c} for pure states.
        let (keep, trace) = if inside.len() <= outside.len() { (inside, outside) } else { (outside, inside) };
        let da = 1usize << keep.len();
        let db = 1usize << trace.len();
        let mut psi = DMatrix::<C>::zeros(da, db);
        for idx in 0..self.amps.len() {
            let a: usize = keep.iter().enumerate().map(|(j, &q)| (idx >> q & 1) << j).sum();
            let b: usize = trace.iter().enumerate().map(|(j, &q)| (idx >> q & 1) << j).sum();
            psi[(a, b)] = self.amps[idx];
        }
        let rho = &psi * psi.adjoint();
        let eig = rho.symmetric_eigenvalues();
        eig.iter().filter(|&&l| l > 1e-12).map(|&l| -l * l.log2()).sum()
    }
}

/// Hard-coded textbook gates, used to check [`clifford_unitary`].
pub fn textbook(name: &str) -> DMatrix<C> {
    let r = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (o, l, i) = (C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 1.0));
    match name {
        "H" => DMatrix::from_row_slice(2, 2, &[r, r, r, -r]),
        "S" => DMatrix::from_row_slice(2, 2, &[l, o, o, i]),
        // Control on qubit 0 (least significant), target on qubit 1.
        "CNOT" => DMatrix::from_row_slice(4, 4, &[l, o, o, o, o, o, o, l, o, o, l, o, o, l, o, o]),
        _ => panic!("unknown gate {name}"),
    }
}

/// Whether `a = e^{iφ} b` for some global phase.
pub fn equal_up_to_phase(a: &DMatrix<C>, b: &DMatrix<C>) -> bool {
    let (idx, _) = b.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm())).unwrap();
    let phase = a.as_slice()[idx] / b.as_slice()[idx];
    if (phase.norm() - 1.0).abs() > 1e-9 {
        return false;
    }
    (a - b * phase).norm() < 1e-9
}
