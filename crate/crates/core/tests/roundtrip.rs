use proptest::prelude::*;
use rlfc_core::color::image_to_planes;
use rlfc_core::decoder::AccessTrace;
use rlfc_core::encoder::compress_full;
use rlfc_core::hierarchy::{build_rkv_tree, FilterSpec};
use rlfc_core::synth::{synthesize_lightfield, SyntheticSpec};
use rlfc_core::{CodecId, DecoderState, EncodingParams, LightFieldGrid, RawOnly, RgbImage};

fn params(tb: u32, b: u8, s: u8, h: u8) -> EncodingParams {
    EncodingParams {
        block_threshold: tb,
        block_size: b,
        quant_shift: s,
        tree_height: h,
        root_codec: CodecId::Raw,
        ..Default::default()
    }
}

fn synth(s: usize, t: usize, w: usize, h: usize, seed: u64) -> LightFieldGrid {
    synthesize_lightfield(&SyntheticSpec { s_count: s, t_count: t, width: w, height: h, seed }).unwrap()
}

#[test]
fn lossless_is_bit_exact() {
    let lf = synth(6, 5, 19, 13, 4);
    for h in 1..=4 {
        let p = EncodingParams { tree_height: h, ..EncodingParams::lossless() };
        let enc = compress_full(&lf, &p, &RawOnly).unwrap();
        let dec = DecoderState::init(enc.stream, &RawOnly).unwrap();
        assert_eq!(dec.decode_all().unwrap().images, lf.images, "h={h}");
    }
}

#[test]
fn decoder_matches_encoder_reconstruction() {
    let lf = synth(8, 8, 24, 20, 9);
    for p in [params(80, 4, 2, 3), params(0, 2, 0, 2), params(150, 8, 3, 1), params(50, 16, 1, 4)] {
        let enc = compress_full(&lf, &p, &RawOnly).unwrap();
        let dec = DecoderState::init(enc.stream.clone(), &RawOnly).unwrap();
        for t in 0..8 {
            for s in 0..8 {
                let planes = dec.decode_planes((s, t), 0).unwrap();
                assert_eq!(planes, enc.reconstruction[t * 8 + s], "{p:?} ({s},{t})");
            }
        }
    }
}

#[test]
fn random_access_matches_full_decode() {
    let lf = synth(5, 7, 21, 11, 3);
    let enc = compress_full(&lf, &params(50, 4, 2, 3), &RawOnly).unwrap();
    let dec = DecoderState::init(enc.stream, &RawOnly).unwrap();
    let full = dec.decode_all().unwrap();
    let (bc, br) = dec.block_grid();
    for t in 0..7 {
        for s in 0..5 {
            let planes = image_to_planes(full.image(s, t));
            for c in 0..3 {
                for by in 0..br {
                    for bx in 0..bc {
                        let mut trace = AccessTrace::default();
                        let blk = dec.decode_block_probed((s, t), (bx, by), c, 0, &mut trace).unwrap();
                        assert!(trace.reads.len() <= 1);
                        let rec = dec.section(c).record_range(by * bc + bx);
                        for (_, r) in &trace.reads {
                            assert!(rec.start <= r.start && r.end <= rec.end);
                        }
                        for dy in 0..4 {
                            for dx in 0..4 {
                                let (x, y) = (bx * 4 + dx, by * 4 + dy);
                                if x < 21 && y < 11 {
                                    assert_eq!(blk.get(dx, dy), i32::from(planes[c].get(x, y)));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn progressive_top_level_is_the_root() {
    let lf = synth(8, 4, 16, 16, 1);
    let p = params(50, 4, 2, 3);
    let tree = build_rkv_tree(&lf, &p).unwrap();
    let enc = compress_full(&lf, &p, &RawOnly).unwrap();
    let dec = DecoderState::init(enc.stream, &RawOnly).unwrap();
    let roots = tree.roots();
    for t in 0..4 {
        for s in 0..8 {
            let planes = dec.decode_planes((s, t), 3).unwrap();
            assert_eq!(planes, roots.nodes[(t >> 3) * roots.cols + (s >> 3)].planes);
        }
    }
    assert!(dec.decode_block_progressive((0, 0), (0, 0), 0, 4).is_err());
}

#[test]
fn single_camera_and_tiny_images() {
    let lf = synth(1, 1, 1, 1, 0);
    let enc = compress_full(&lf, &EncodingParams::lossless(), &RawOnly).unwrap();
    let dec = DecoderState::init(enc.stream, &RawOnly).unwrap();
    assert_eq!(dec.decode_all().unwrap().images, lf.images);
}

#[test]
fn uniform_filter_is_also_closed_loop() {
    let lf = synth(4, 4, 12, 12, 6);
    let p = EncodingParams { filter: FilterSpec::uniform(), ..params(20, 4, 1, 2) };
    let enc = compress_full(&lf, &p, &RawOnly).unwrap();
    let dec = DecoderState::init(enc.stream, &RawOnly).unwrap();
    for (i, r) in enc.reconstruction.iter().enumerate() {
        assert_eq!(&dec.decode_planes((i % 4, i / 4), 0).unwrap(), r);
    }
}

fn arb_lightfield() -> impl Strategy<Value = LightFieldGrid> {
    (1usize..5, 1usize..5, 1usize..10, 1usize..10).prop_flat_map(|(s, t, w, h)| {
        proptest::collection::vec(any::<u8>(), s * t * w * h * 3).prop_map(move |data| {
            let images = data
                .chunks(w * h * 3)
                .map(|c| RgbImage::from_vec(w, h, c.to_vec()).unwrap())
                .collect();
            LightFieldGrid::new(s, t, images).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lossless_roundtrip_any_input(lf in arb_lightfield(), h in 1u8..4, b in prop::sample::select(vec![2u8, 4, 8])) {
        let p = EncodingParams { tree_height: h, block_size: b, ..EncodingParams::lossless() };
        let enc = compress_full(&lf, &p, &RawOnly).unwrap();
        let dec = DecoderState::init(enc.stream, &RawOnly).unwrap();
        prop_assert_eq!(dec.decode_all().unwrap().images, lf.images);
    }

    #[test]
    fn lossy_decode_is_deterministic_and_closed_loop(
        lf in arb_lightfield(), tb in 0u32..200, tp in 0u16..8, s in 0u8..4,
    ) {
        let p = EncodingParams { block_threshold: tb, pixel_threshold: tp, quant_shift: s, ..params(0, 4, 0, 2) };
        let enc = compress_full(&lf, &p, &RawOnly).unwrap();
        let (s_count, _) = (lf.s_count, lf.t_count);
        let dec = DecoderState::init(enc.stream.clone(), &RawOnly).unwrap();
        for (i, r) in enc.reconstruction.iter().enumerate() {
            prop_assert_eq!(&dec.decode_planes((i % s_count, i / s_count), 0).unwrap(), r);
        }
        let again = compress_full(&lf, &p, &RawOnly).unwrap();
        prop_assert_eq!(again.stream, enc.stream);
    }

    #[test]
    fn corrupted_streams_never_panic(seed in any::<u64>(), flips in proptest::collection::vec((any::<usize>(), any::<u8>()), 1..8)) {
        let lf = synth(3, 3, 8, 8, seed % 4);
        let enc = compress_full(&lf, &params(30, 4, 1, 2), &RawOnly).unwrap();
        let mut bytes = enc.stream;
        for (at, v) in flips {
            let n = bytes.len();
            bytes[at % n] ^= v;
        }
        if let Ok(dec) = DecoderState::init(bytes, &RawOnly) {
            let _ = dec.decode_all();
        }
    }
}
