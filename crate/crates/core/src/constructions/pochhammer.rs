use rug::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `x↓α = x(x−1)…(x−α+1)`
    Falling,
    /// `x↑α = x(x+1)…(x+α−1)`
    Rising,
}

/// A Pochhammer symbol together with its exact value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PochhammerValue {
    pub base: Rational,
    pub steps: u32,
    pub direction: Direction,
    pub value: Rational,
}

impl PochhammerValue {
    pub fn new(base: Rational, steps: u32, direction: Direction) -> Self {
        let value = pochhammer(&base, steps, direction);
        PochhammerValue {
            base,
            steps,
            direction,
            value,
        }
    }
}

/// Exact falling or rising factorial; the empty product is 1.
pub fn pochhammer(base: &Rational, steps: u32, direction: Direction) -> Rational {
    let mut value = Rational::from(1);
    for j in 0..steps {
        let factor = match direction {
            Direction::Falling => Rational::from(base - j),
            Direction::Rising => Rational::from(base + j),
        };
        value *= factor;
    }
    value
}

pub fn falling(base: &Rational, steps: u32) -> Rational {
    pochhammer(base, steps, Direction::Falling)
}

pub fn rising(base: &Rational, steps: u32) -> Rational {
    pochhammer(base, steps, Direction::Rising)
}
