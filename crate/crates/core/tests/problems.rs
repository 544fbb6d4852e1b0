use spindle_core::hadamard::{strip_first_row, sylvester};
use spindle_core::problems::{
    apply_feature_map, complement_problem, doubled_targets, duplicated_problem, gaussian_problem, permuted_problem,
    random_sign_problem, sign_flip_problem, Family, FeatureMap, LabelRange, Problem, SignPattern,
};

#[test]
fn sign_flip_rows_are_signed_hadamard_rows() {
    let h = sylvester(4).unwrap();
    let p: Problem<f64> = sign_flip_problem(&h, 11);
    assert_eq!((p.n(), p.dim()), (16, 16));
    for t in 0..16 {
        let s = p.label(t);
        assert!(s == 1.0 || s == -1.0);
        assert!((0..16).all(|j| p.x[(t, j)] == s * h.entry(t, j) as f64));
    }
    assert_eq!(sign_flip_problem::<f64>(&h, 11).x, p.x);
    assert_ne!(sign_flip_problem::<f64>(&h, 12).y, p.y);
}

#[test]
fn complement_is_zero_one() {
    let ht = strip_first_row(&sylvester(3).unwrap());
    let p: Problem<f64> = complement_problem(&ht, 4);
    assert_eq!((p.n(), p.dim()), (7, 8));
    assert_eq!(p.label_range, LabelRange::ZeroOne);
    assert!(p.x.as_slice().iter().chain(p.y.as_slice()).all(|&v| v == 0.0 || v == 1.0));
}

#[test]
fn permuted_labels_are_balanced() {
    let h = sylvester(4).unwrap();
    let p: Problem<f64> = permuted_problem(&h, 3, 9).unwrap();
    assert_eq!(p.target().iter().sum::<f64>(), 0.0);
    assert!(permuted_problem::<f64>(&h, 16, 9).is_err());
}

#[test]
fn gaussian_targets_follow_w_star() {
    let mut w = vec![0.0; 8];
    w[2] = 1.0;
    let p: Problem<f64> = gaussian_problem(8, 12, &w, 3).unwrap();
    assert_eq!((p.n(), p.dim()), (12, 8));
    assert!((0..12).all(|t| p.label(t) == p.x[(t, 2)]));
}

#[test]
fn random_sign_and_duplicated_shapes() {
    let p: Problem<f64> = random_sign_problem(8, 20, 1, 5).unwrap();
    assert_eq!(p.family, Family::RandomSign);
    assert!((0..20).all(|t| p.label(t) == p.x[(t, 1)]));
    let h = sylvester(3).unwrap();
    let dup: Problem<f64> = duplicated_problem(&h, 3, None).unwrap();
    assert_eq!((dup.n(), dup.dim()), (48, 8));
    assert!(duplicated_problem::<f64>(&h, 0, None).is_err());
}

#[test]
fn doubled_targets_have_2d_columns() {
    let h = sylvester(3).unwrap();
    let p: Problem<f64> = doubled_targets(&h, false);
    assert_eq!(p.y.shape(), (8, 16));
    let q: Problem<f64> = doubled_targets(&h, true);
    assert_eq!(q.y.as_slice().iter().sum::<f64>(), 64.0);
    assert!(q.clone().with_target(15).is_ok() && q.with_target(16).is_err());
}

#[test]
fn family_tags_round_trip() {
    for f in [Family::SignFlip, Family::Complement01, Family::Permuted, Family::GaussianSparse, Family::Duplicated, Family::DoubledHadamard, Family::ShiftedDoubled, Family::RandomSign] {
        assert_eq!(Family::parse(f.tag()).unwrap(), f);
    }
    assert!(Family::parse("nope").is_err());
}

#[test]
fn feature_maps_and_single_precision() {
    let h = sylvester(3).unwrap();
    let p: Problem<f64> = sign_flip_problem(&h, 1);
    let q = apply_feature_map(&p, &FeatureMap::ConstantE1 { output_dim: 4 }).unwrap();
    assert_eq!(q.dim(), 4);
    let custom = FeatureMap::custom(2, |x: &[f64]| vec![x[0], -x[0]]);
    assert_eq!(apply_feature_map(&p, &custom).unwrap().dim(), 2);
    let f: Problem<f32> = p.cast();
    assert_eq!(f.x[(3, 3)] as f64, p.x[(3, 3)]);
    let s = SignPattern::draw(10, 2);
    assert_eq!(s.len(), 10);
    assert!(SignPattern::ones(3).as_scalars::<f64>().iter().all(|&v| v == 1.0));
}
