//! Byte-exact encodings.
//!
//! A tuple is the concatenation of its fields, each written as a 4-byte
//! big-endian length followed by the field bytes. A classical register holds
//! the 3-tuple `(sender, recipient, payload)`; protocol payloads are tuples
//! whose first field is an ASCII tag.

use super::MachineId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("classical register content does not parse as (sender, recipient, payload)")]
pub struct ParseFailure;

pub fn encode_tuple<F: AsRef<[u8]>>(fields: &[F]) -> Vec<u8> {
    let len: usize = fields.iter().map(|f| 4 + f.as_ref().len()).sum();
    let mut out = Vec::with_capacity(len);
    for f in fields {
        let f = f.as_ref();
        out.extend_from_slice(&(f.len() as u32).to_be_bytes());
        out.extend_from_slice(f);
    }
    out
}

/// Splits a tuple into its fields; `None` if the bytes are not exactly a
/// sequence of length-prefixed fields.
pub fn decode_tuple(mut bytes: &[u8]) -> Option<Vec<&[u8]>> {
    let mut fields = Vec::new();
    while !bytes.is_empty() {
        if bytes.len() < 4 {
            return None;
        }
        let len = u32::from_be_bytes(bytes[..4].try_into().ok()?) as usize;
        let rest = &bytes[4..];
        if rest.len() < len {
            return None;
        }
        fields.push(&rest[..len]);
        bytes = &rest[len..];
    }
    Some(fields)
}

/// Content of the classical communication register.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassicalMessage {
    pub sender: MachineId,
    pub recipient: MachineId,
    pub payload: Vec<u8>,
}

impl ClassicalMessage {
    pub fn new(sender: MachineId, recipient: MachineId, payload: Vec<u8>) -> Self {
        ClassicalMessage {
            sender,
            recipient,
            payload,
        }
    }

    /// `(ε, environment, ε)`.
    pub fn reset() -> Self {
        ClassicalMessage::new(MachineId::epsilon(), MachineId::environment(), Vec::new())
    }

    pub fn is_reset(&self) -> bool {
        self.sender.is_epsilon() && self.recipient.is_environment() && self.payload.is_empty()
    }

    pub fn encode(&self) -> Vec<u8> {
        encode_tuple(&[self.sender.as_bytes(), self.recipient.as_bytes(), &self.payload])
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, ParseFailure> {
        match decode_tuple(bytes).as_deref() {
            Some([s, r, p]) => Ok(ClassicalMessage::new(
                MachineId::from_field(s),
                MachineId::from_field(r),
                p.to_vec(),
            )),
            _ => Err(ParseFailure),
        }
    }
}

/// `(tag, args...)`.
pub fn payload(tag: &str, args: &[&[u8]]) -> Vec<u8> {
    let mut fields: Vec<&[u8]> = Vec::with_capacity(args.len() + 1);
    fields.push(tag.as_bytes());
    fields.extend_from_slice(args);
    encode_tuple(&fields)
}

/// A parsed protocol payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fields<'a> {
    pub tag: &'a [u8],
    pub args: Vec<&'a [u8]>,
}

impl<'a> Fields<'a> {
    pub fn parse(bytes: &'a [u8]) -> Option<Self> {
        let mut fields = decode_tuple(bytes)?;
        if fields.is_empty() {
            return None;
        }
        let tag = fields.remove(0);
        Some(Fields { tag, args: fields })
    }

    /// Whether the tag is `tag` and there are exactly `arity` arguments.
    pub fn is(&self, tag: &str, arity: usize) -> bool {
        self.tag == tag.as_bytes() && self.args.len() == arity
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout_is_length_prefixed() {
        assert_eq!(encode_tuple(&[b"ab".as_slice(), b""]), vec![0, 0, 0, 2, b'a', b'b', 0, 0, 0, 0]);
    }

    #[test]
    fn rejects_trailing_garbage_and_wrong_arity() {
        let mut bytes = ClassicalMessage::reset().encode();
        bytes.push(0);
        assert_eq!(ClassicalMessage::parse(&bytes), Err(ParseFailure));
        assert_eq!(ClassicalMessage::parse(&encode_tuple(&[b"a", b"b"])), Err(ParseFailure));
        assert_eq!(ClassicalMessage::parse(b"xyz"), Err(ParseFailure));
    }

    #[test]
    fn payload_fields() {
        let p = payload("T", &[b"0110"]);
        let f = Fields::parse(&p).unwrap();
        assert!(f.is("T", 1));
        assert!(!f.is("T", 0));
        assert_eq!(f.args[0], b"0110");
        assert!(Fields::parse(&[]).is_none());
    }

    proptest! {
        #[test]
        fn message_round_trip(
            s in proptest::collection::vec(any::<u8>(), 1..8),
            r in proptest::collection::vec(any::<u8>(), 1..8),
            p in proptest::collection::vec(any::<u8>(), 0..40),
        ) {
            let m = ClassicalMessage::new(MachineId::new(&s).unwrap(), MachineId::new(&r).unwrap(), p);
            prop_assert_eq!(ClassicalMessage::parse(&m.encode()).unwrap(), m);
        }

        #[test]
        fn tuple_round_trip(fields in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..10), 0..6)) {
            let enc = encode_tuple(&fields);
            let dec: Vec<Vec<u8>> = decode_tuple(&enc).unwrap().into_iter().map(|f| f.to_vec()).collect();
            prop_assert_eq!(dec, fields);
        }
    }
}
