use super::FemError;

/// Isotropic linear elastic material in SI units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material {
    pub young_modulus: f64,
    pub poisson_ratio: f64,
    pub density: f64,
}

impl Material {
    pub fn new(young_modulus: f64, poisson_ratio: f64, density: f64) -> Result<Self, FemError> {
        if !(young_modulus > 0.0 && young_modulus.is_finite()) {
            return Err(FemError::InvalidMaterial {
                field: "young_modulus",
                value: young_modulus,
            });
        }
        if !(0.0..0.5).contains(&poisson_ratio) {
            return Err(FemError::InvalidMaterial {
                field: "poisson_ratio",
                value: poisson_ratio,
            });
        }
        if !(density > 0.0 && density.is_finite()) {
            return Err(FemError::InvalidMaterial {
                field: "density",
                value: density,
            });
        }
        Ok(Self {
            young_modulus,
            poisson_ratio,
            density,
        })
    }

    /// Structural steel: E = 207 GPa, ν = 0.3, ρ = 7800 kg/m³.
    pub fn steel() -> Self {
        Self {
            young_modulus: 207e9,
            poisson_ratio: 0.3,
            density: 7800.0,
        }
    }

    /// Lamé parameters `(λ, μ)`.
    pub fn lame(&self) -> (f64, f64) {
        let (e, nu) = (self.young_modulus, self.poisson_ratio);
        (
            e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)),
            e / (2.0 * (1.0 + nu)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Material::new(1.0, 0.0, 1.0).is_ok());
        assert!(matches!(
            Material::new(0.0, 0.3, 1.0),
            Err(FemError::InvalidMaterial {
                field: "young_modulus",
                ..
            })
        ));
        assert!(matches!(
            Material::new(1.0, 0.5, 1.0),
            Err(FemError::InvalidMaterial {
                field: "poisson_ratio",
                ..
            })
        ));
        assert!(matches!(
            Material::new(1.0, -0.1, 1.0),
            Err(FemError::InvalidMaterial {
                field: "poisson_ratio",
                ..
            })
        ));
        assert!(matches!(
            Material::new(1.0, 0.2, f64::NAN),
            Err(FemError::InvalidMaterial {
                field: "density",
                ..
            })
        ));
    }

    #[test]
    fn lame_at_zero_poisson() {
        let (l, m) = Material::new(2.0, 0.0, 1.0).unwrap().lame();
        assert_eq!((l, m), (0.0, 1.0));
    }
}
