//! JSON interchange for matrices, elements and subalgebras.
//!
//! ```text
//! complex      [re, im]
//! matrix       {"rows": n, "cols": m, "data": [[re, im], ...]}   row-major
//! element      {"dims": [...], "blocks": [matrix, ...]}
//! central      {"mask": [bool, ...]}
//! subalgebra   {"atoms": [element, ...], "contains_center": bool}
//! ```

use num_complex::Complex64;
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{BlockAlgebra, BlockElement, CentralProjection, ProjectionElement};
use crate::commutative::CommutativeSubalgebra;
use crate::linalg::{CMatrix, Tolerance};

/// Version tag carried by every report.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CMatrix", 3)?;
        st.serialize_field("rows", &self.rows())?;
        st.serialize_field("cols", &self.cols())?;
        let data: Vec<[f64; 2]> = self.data().iter().map(|z| [z.re, z.im]).collect();
        st.serialize_field("data", &data)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        let data = repr.data.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        CMatrix::from_vec(repr.rows, repr.cols, data)
            .ok_or_else(|| D::Error::custom("matrix data length does not match rows * cols"))
    }
}

#[derive(Deserialize)]
struct ElementRepr {
    dims: Vec<usize>,
    blocks: Vec<CMatrix>,
}

impl Serialize for BlockElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BlockElement", 2)?;
        st.serialize_field("dims", self.algebra().dims())?;
        st.serialize_field("blocks", self.blocks())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for BlockElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(d)?;
        let algebra = BlockAlgebra::new(repr.dims).map_err(D::Error::custom)?;
        BlockElement::new(&algebra, repr.blocks).map_err(D::Error::custom)
    }
}

impl Serialize for ProjectionElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_element().serialize(s)
    }
}

impl ProjectionElement {
    /// Parses an element and checks that it is a projection.
    pub fn from_json(text: &str, tol: Tolerance) -> Result<Self, String> {
        let el: BlockElement = serde_json::from_str(text).map_err(|e| e.to_string())?;
        ProjectionElement::new(el, tol).map_err(|e| e.to_string())
    }
}

impl Serialize for CentralProjection {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CentralProjection", 1)?;
        st.serialize_field("mask", self.mask())?;
        st.end()
    }
}

impl Serialize for CommutativeSubalgebra {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CommutativeSubalgebra", 2)?;
        st.serialize_field("atoms", self.atoms())?;
        st.serialize_field("contains_center", &self.contains_center())?;
        st.end()
    }
}
