use ctwm_core::contourlet::{ct_forward, CtConfig};
use ctwm_core::lowpass_codec::{
    decode, encode, inverse_reorder, predict_decode, predict_encode, reorder, spiral_order,
};
use ctwm_core::metrics::{entropy, entropy_i64};
use ctwm_core::quantizer::{compress, decompress, dequantize, quantize, QuantSpec};
use ctwm_core::{Band, GrayImage};
use proptest::prelude::*;

fn int_band(rows: usize, cols: usize) -> impl Strategy<Value = Band> {
    prop::collection::vec(-5000i32..5000, rows * cols)
        .prop_map(move |v| Band::new(rows, cols, v.into_iter().map(f64::from).collect()).unwrap())
}

proptest! {
    #[test]
    fn prediction_is_lossless(b in (1usize..12, 1usize..12).prop_flat_map(|(r, c)| int_band(r, c))) {
        let res = predict_encode(&b).unwrap();
        prop_assert_eq!(predict_decode(&res).unwrap(), b);
    }

    #[test]
    fn square_codec_is_lossless(b in (1usize..16).prop_flat_map(|n| int_band(n, n))) {
        prop_assert_eq!(inverse_reorder(&reorder(&b).unwrap()).unwrap(), b.clone());
        prop_assert_eq!(decode(&encode(&b).unwrap()).unwrap(), b);
    }

    #[test]
    fn entropy_bounds(v in prop::collection::vec(-20i64..20, 1..400)) {
        let h = entropy_i64(&v);
        let mut distinct = v.clone();
        distinct.sort_unstable();
        distinct.dedup();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (distinct.len() as f64).log2() + 1e-12);
        let as_f: Vec<f64> = v.iter().map(|&x| x as f64).collect();
        prop_assert!((entropy(&as_f) - h).abs() < 1e-12);
    }

    #[test]
    fn quantization_error_is_half_a_step(
        x in prop::collection::vec(0u8..=255, 256),
        d in prop::collection::vec(0.25f64..20.0, 7),
    ) {
        let img = GrayImage::from_u8(16, 16, &x).unwrap();
        let cfg: CtConfig = "2,1".parse().unwrap();
        let pyr = ct_forward(&img, &cfg).unwrap();
        let spec = QuantSpec::new(d.clone()).unwrap();
        let back = dequantize(&quantize(&pyr, &spec).unwrap(), &spec).unwrap();
        for ((id, a), (_, b)) in pyr.bands().zip(back.bands()) {
            prop_assert!(a.max_abs_diff(b) <= d[id] / 2.0 + 1e-9);
        }
    }
}

#[test]
fn spiral_visits_every_cell_once() {
    for n in 0..20 {
        let mut s = spiral_order(n);
        s.sort_unstable();
        assert_eq!(s, (0..n * n).collect::<Vec<_>>());
    }
    assert_eq!(spiral_order(3), [0, 1, 2, 5, 8, 7, 6, 3, 4]);
}

#[test]
fn unit_divisors_without_decomposition_are_exact() {
    let img = GrayImage::from_fn(32, 32, |r, c| ((r * 7 + c * c) % 256) as f64);
    let cfg = CtConfig::identity();
    let spec = QuantSpec::uniform(cfg.band_count(), 1.0).unwrap();
    let c = compress(&img, &cfg, Some(&spec)).unwrap();
    assert_eq!(decompress(&c.quantized, &c.spec).unwrap(), img);
}
