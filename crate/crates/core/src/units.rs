//! Conversions between document units (mm, GPa, degrees) and the SI units
//! used everywhere else in the crate.

pub const MM: f64 = 1e-3;
pub const GPA: f64 = 1e9;

#[inline]
pub fn mm_to_m(mm: f64) -> f64 {
    mm * MM
}

#[inline]
pub fn m_to_mm(m: f64) -> f64 {
    m / MM
}

#[inline]
pub fn gpa_to_pa(gpa: f64) -> f64 {
    gpa * GPA
}

#[inline]
pub fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

#[inline]
pub fn rad_to_deg(rad: f64) -> f64 {
    rad.to_degrees()
}
