use std::fmt;

/// Chemical elements understood by the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    H,
    C,
    N,
    O,
    F,
    P,
    S,
    Cl,
    Br,
    I,
}

impl Element {
    pub const ALL: [Element; 10] = [
        Element::H,
        Element::C,
        Element::N,
        Element::O,
        Element::F,
        Element::P,
        Element::S,
        Element::Cl,
        Element::Br,
        Element::I,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Element::H => "H",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::F => "F",
            Element::P => "P",
            Element::S => "S",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::I => "I",
        }
    }

    pub fn atomic_number(self) -> u8 {
        match self {
            Element::H => 1,
            Element::C => 6,
            Element::N => 7,
            Element::O => 8,
            Element::F => 9,
            Element::P => 15,
            Element::S => 16,
            Element::Cl => 17,
            Element::Br => 35,
            Element::I => 53,
        }
    }

    pub fn from_symbol(symbol: &str) -> Option<Element> {
        Element::ALL.into_iter().find(|e| e.symbol() == symbol)
    }

    pub fn from_atomic_number(z: u8) -> Option<Element> {
        Element::ALL.into_iter().find(|e| e.atomic_number() == z)
    }

    /// Elements that may be written without brackets in SMILES.
    pub fn is_organic_subset(self) -> bool {
        !matches!(self, Element::H)
    }

    /// Elements that may be written in lowercase (aromatic) form.
    pub fn can_be_aromatic(self) -> bool {
        matches!(self, Element::C | Element::N | Element::O | Element::P | Element::S)
    }

    /// Allowed valences for a neutral atom, lowest first.
    pub fn neutral_valences(self) -> &'static [u8] {
        match self {
            Element::H => &[1],
            Element::C => &[4],
            Element::N => &[3],
            Element::O => &[2],
            Element::P => &[3, 5],
            Element::S => &[2, 4, 6],
            Element::F | Element::Cl | Element::Br | Element::I => &[1],
        }
    }

    /// Allowed valences once a formal charge is taken into account.
    ///
    /// Carbon loses one bond per unit of charge in either direction; the
    /// pnictogens and chalcogens behave like their isoelectronic neighbours
    /// (N+ like C, O- like F, ...).
    pub fn valences(self, charge: i8) -> Vec<u8> {
        let shift = |v: u8| -> Option<u8> {
            let adjusted = match self {
                Element::C => i16::from(v) - i16::from(charge).abs(),
                Element::H | Element::F | Element::Cl | Element::Br | Element::I => {
                    i16::from(v) - i16::from(charge).abs()
                }
                Element::N | Element::P => i16::from(v) + i16::from(charge),
                Element::O | Element::S => i16::from(v) + i16::from(charge),
            };
            u8::try_from(adjusted).ok()
        };
        let mut out: Vec<u8> = self.neutral_valences().iter().filter_map(|&v| shift(v)).collect();
        out.dedup();
        out
    }

    pub fn max_valence(self, charge: i8) -> Option<u8> {
        self.valences(charge).into_iter().max()
    }

    /// Lone-pair donors contribute no extra bond order in aromatic rings.
    pub(crate) fn aromatic_pi_bond(self) -> bool {
        matches!(self, Element::C | Element::N | Element::P)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}
