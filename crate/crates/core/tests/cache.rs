use griglab::enumeration::{ball, ball_cached, cache_path, load_ball, save_ball};
use griglab::{Error, Group};

#[test]
fn round_trip_is_exact() {
    let g = Group::grigorchuk();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b6.ball");
    let b = ball(&g, 6).unwrap();
    save_ball(&b, &path).unwrap();
    let back = load_ball(&g, &path).unwrap();
    assert_eq!(back.len(), b.len());
    assert_eq!(back.radius(), 6);
    for i in 0..b.len() {
        assert_eq!(back.element(i), b.element(i));
        assert_eq!(back.word(i), b.word(i));
    }
    let first = std::fs::read(&path).unwrap();
    save_ball(&back, &path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn corrupted_payload_is_rejected() {
    let g = Group::grigorchuk();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b4.ball");
    save_ball(&ball(&g, 4).unwrap(), &path).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0x5a;
    std::fs::write(&path, &bytes).unwrap();
    assert!(matches!(load_ball(&g, &path), Err(Error::Cache(_))));
    std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
    assert!(matches!(load_ball(&g, &path), Err(Error::Cache(_))));
}

#[test]
fn other_presets_cannot_load() {
    let g = Group::grigorchuk();
    let other = Group::load("gupta-sidki-3").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b3.ball");
    save_ball(&ball(&g, 3).unwrap(), &path).unwrap();
    assert!(load_ball(&other, &path).is_err());
}

#[test]
fn cached_balls_are_reused_and_repaired() {
    let g = Group::grigorchuk();
    let dir = tempfile::tempdir().unwrap();
    let b = ball_cached(&g, 5, Some(dir.path())).unwrap();
    let path = cache_path(dir.path(), &g, 5);
    assert!(path.exists());
    let again = ball_cached(&g, 5, Some(dir.path())).unwrap();
    assert_eq!(again.elements(), b.elements());
    std::fs::write(&path, b"garbage").unwrap();
    let repaired = ball_cached(&g, 5, Some(dir.path())).unwrap();
    assert_eq!(repaired.elements(), b.elements());
    assert!(load_ball(&g, &path).is_ok());
}
