//! Threshold ElGamal over G1, m-of-m Paillier, the share-channel scheme and
//! the re-encryption shuffle.

pub mod elgamal;
pub mod paillier;
pub mod pke;
pub mod shuffle;

pub use elgamal::{EgCiphertext, EgKeyMaterial, EgPublicKey, EgScheme, EgSecretShare};
pub use paillier::{PaillierCiphertext, PaillierKeyShare, PaillierPublicKey};
pub use pke::{PkeCiphertext, PkePublicKey, PkeSecretKey};
pub use shuffle::{Permutation, ReEncrypt};
