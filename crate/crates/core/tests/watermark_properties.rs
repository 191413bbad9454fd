use ctwm_core::watermark::{
    embed, embed_coefficients, embed_value, extract, extract_coefficients, extract_value, ncc,
    EmbedConfig, EmbedRule,
};
use ctwm_core::{Band, GrayImage, WatermarkBits};
use proptest::prelude::*;

proptest! {
    #[test]
    fn centered_marks_survive_sub_quarter_noise(
        f in -4000.0f64..4000.0,
        bit in 0u8..=1,
        q in 2.0f64..64.0,
        t in -0.999f64..0.999,
    ) {
        let g = embed_value(f, bit, q, EmbedRule::Centered);
        prop_assert!((g - f).abs() <= q / 2.0 + 1e-9);
        prop_assert_eq!(extract_value(g + t * q / 4.0, q), bit);
    }

    #[test]
    fn literal_marks_read_back(f in -4000.0f64..4000.0, bit in 0u8..=1, q in 2.0f64..64.0) {
        let g = embed_value(f, bit, q, EmbedRule::Literal);
        prop_assert_eq!(extract_value(g, q), bit);
        prop_assert!((g - f).abs() <= q / 2.0 + 1e-9);
    }

    #[test]
    fn coefficient_roundtrip(
        values in prop::collection::vec(-1000.0f64..3000.0, 64),
        bits in prop::collection::vec(0u8..=1, 24),
        seed in any::<u64>(),
    ) {
        let mut band = Band::new(8, 8, values).unwrap();
        let wm = WatermarkBits::new(6, 4, bits).unwrap();
        let cfg = EmbedConfig { seed, ..EmbedConfig::default() };
        embed_coefficients(&mut band, &wm, &cfg).unwrap();
        prop_assert_eq!(extract_coefficients(&band, &cfg, 6, 4).unwrap(), wm);
    }
}

#[test]
fn blind_image_roundtrip_and_wrong_key() {
    // Saturates at both ends, so clipping interferes with the marks.
    let cover = GrayImage::from_fn(128, 128, |r, c| {
        (128.0 + 180.0 * ((r as f64) / 9.0).sin() * ((c as f64) / 13.0).cos()).round()
    })
    .materialize();
    let wm =
        WatermarkBits::new(16, 16, (0..256).map(|i| ((i * 7) % 3 == 0) as u8).collect()).unwrap();
    let cfg = EmbedConfig::default();
    let marked = embed(&cover, &wm, &cfg).unwrap();
    assert_eq!(extract(&marked, &cfg, 16, 16).unwrap(), wm);
    let wrong = EmbedConfig { seed: 99, ..cfg };
    assert!(ncc(&wm, &extract(&marked, &wrong, 16, 16).unwrap()).unwrap() < 0.9);
}
