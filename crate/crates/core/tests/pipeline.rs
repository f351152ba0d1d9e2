use fptc::decoder::reconstruct;
use fptc::{
    compress, decompress, decompress_with, prd, quantize_strip, smooth_corpus, train_default,
    train_profile, CodecParams, Error, ParseError, SineMix,
};

#[test]
fn entropy_stage_adds_no_error() {
    let signal = SineMix { seed: 3, noise: 0.1, ..Default::default() }.generate(40_000);
    let profile = train_default(&[&signal], CodecParams::default()).unwrap();
    let levels = quantize_strip(&signal, &profile).unwrap();
    let oracle = reconstruct(&levels, &profile.table, signal.len(), 1).unwrap();
    let bytes = compress(&signal, &profile).unwrap().to_bytes();
    let full = decompress_with(&bytes, 4).unwrap().samples;
    assert_eq!(
        full.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        oracle.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
}

#[test]
fn constant_signal_beats_truncation_ratio() {
    // Trained on varied data: a constant strip alone would set the AC zone
    // maxima from rounding residue.
    let profile = train_default(&[smooth_corpus(1 << 16, 8)], CodecParams::default()).unwrap();
    let signal = vec![0.75f32; 1 << 16];
    let bytes = compress(&signal, &profile).unwrap().to_bytes();
    let back = decompress(&bytes).unwrap();
    let cr = (signal.len() * 4) as f64 / bytes.len() as f64;
    // Above the N/E * 4 ratio of truncation alone.
    assert!(cr > 8.0, "cr {cr}");
    assert!(prd(&signal, &back).unwrap() < 5.0);
}

#[test]
fn silence_roundtrips_to_silence() {
    let signal = vec![0f32; 1000];
    let profile = train_default(&[&signal], CodecParams::default()).unwrap();
    let back = decompress(&compress(&signal, &profile).unwrap().to_bytes()).unwrap();
    assert_eq!(back, signal);
}

#[test]
fn odd_lengths_keep_sample_count() {
    let profile = train_default(&[smooth_corpus(4096, 2)], CodecParams::default()).unwrap();
    for len in [1usize, 31, 32, 33, 1000] {
        let signal = smooth_corpus(len, 9);
        let back = decompress(&compress(&signal, &profile).unwrap().to_bytes()).unwrap();
        assert_eq!(back.len(), len);
    }
}

#[test]
fn more_coefficients_less_distortion() {
    let signal = SineMix { seed: 4, noise: 0.02, ..Default::default() }.generate(1 << 15);
    let mut last = f64::INFINITY;
    for e in [2usize, 4, 8, 16, 32] {
        let params = CodecParams { retained: e, zeroed_start: e, ..CodecParams::default() };
        let profile = train_profile(&[&signal], params, 12).unwrap();
        let back = decompress(&compress(&signal, &profile).unwrap().to_bytes()).unwrap();
        let d = prd(&signal, &back).unwrap();
        assert!(d <= last * 1.05, "E={e}: {d} after {last}");
        last = d;
    }
}

#[test]
fn corrupt_payloads_are_reported() {
    let signal = smooth_corpus(5000, 6);
    let profile = train_default(&[&signal], CodecParams::default()).unwrap();
    let mut bytes = compress(&signal, &profile).unwrap().to_bytes();

    let mut bad_magic = bytes.clone();
    bad_magic[0] = b'X';
    assert!(matches!(
        decompress(&bad_magic),
        Err(Error::Parse(ParseError::BadMagic { .. }))
    ));

    // Flip every bit of the final payload word; the decoder must not panic.
    let n = bytes.len();
    for b in &mut bytes[n - 8..] {
        *b = !*b;
    }
    if let Err(e) = decompress(&bytes) {
        assert!(e.is_corruption(), "{e}");
    }
}
