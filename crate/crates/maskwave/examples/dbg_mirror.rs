use maskwave::domain::*;
use maskwave::waveguide::reflectivity_scan;
use num_complex::Complex64;

fn build(pairs: &[(&str, f64)], n_layers: usize, wavelength: f64, flip: bool) -> MaskSpec {
    let mut seq: Vec<(&str, f64)> = pairs.to_vec();
    if flip { seq.reverse(); }
    let mut layers = Vec::new();
    let mut i = 0;
    while layers.len() < n_layers {
        let (m, t) = seq[i % seq.len()];
        let eps = material_permittivity(m, wavelength).unwrap();
        layers.push(Layer::new(PermittivityProfile::Uniform(eps), t, m).unwrap());
        i += 1;
    }
    let depth: f64 = layers.iter().map(|l| l.thickness).sum();
    MaskSpec {
        period_x: wavelength, period_y: None, layers,
        superstrate_eps: Complex64::new(1.0, 0.0),
        substrate_eps: Complex64::new(1.0, 0.0),
        incident: IncidentWave::te(wavelength, 0.1).unwrap(),
        z_min: -depth - wavelength, z_max: wavelength,
    }
}

fn main() {
    let angles: Vec<f64> = (0..=400).map(|i| (i as f64 * 0.05f64).to_radians()).collect();
    let cases: Vec<(&str, Vec<(&str, f64)>, f64)> = vec![
        ("MoSi", vec![("Si", 4.0), ("Mo", 3.0)], 13.5),
        ("MoBe", vec![("Be", 3.5), ("Mo", 2.22)], 11.2),
        ("RuBe", vec![("Be", 3.72), ("Ru", 2.01)], 11.2),
        ("RuBeSr", vec![("Ru", 1.7), ("Be", 2.7), ("Sr", 1.34)], 11.2),
    ];
    for (name, pairs, wl) in &cases {
        for (tag, n, flip) in [("60 periods", 60 * pairs.len(), false),
                               ("60 periods flipped", 60 * pairs.len(), true),
                               ("100 periods", 100 * pairs.len(), false)] {
            let mask = build(pairs, n, *wl, flip);
            let curve = reflectivity_scan(&mask, &angles, 0).unwrap();
            println!("{name} {tag}: max R = {:.4} at {:.2} deg", curve.max_r, curve.max_angle.to_degrees());
        }
    }
}
