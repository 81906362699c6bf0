//! Bodies of the fuzz targets, shared with the corpus replay test. Each takes
//! raw bytes, must never panic, and checks a round trip whenever parsing succeeds.

use titsforge::rational::Rational;
use titsforge::Field;

use crate::descriptor::Descriptor;
use crate::format::AlgebraFile;

pub fn algebra_file(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = AlgebraFile::parse(text) {
        let again = AlgebraFile::parse(&file.emit()).expect("emitted file parses");
        assert_eq!(again, file);
    }
}

pub fn descriptor(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(d) = text.parse::<Descriptor>() {
        let again: Descriptor = d.to_string().parse().expect("displayed descriptor parses");
        assert_eq!(again, d);
    }
}

pub fn field_spec(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = Field::parse_spec(text) {
        assert_eq!(Field::parse_spec(&f.name()).expect("field name parses"), f);
    }
}

/// The first byte picks the field: 0 for ℚ, otherwise one of a few small primes.
pub fn scalar(data: &[u8]) {
    let Some((&sel, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let f = match sel % 4 {
        0 => Field::Rational,
        1 => Field::Prime(3),
        2 => Field::Prime(5),
        _ => Field::Prime(2_147_483_647),
    };
    if let Ok(q) = text.parse::<Rational>() {
        assert_eq!(q.to_string().parse::<Rational>().expect("displayed rational parses"), q);
    }
    if let Ok(c) = f.parse(text) {
        assert_eq!(f.parse(&f.format(&c)).expect("formatted scalar parses"), c);
    }
}
