/// Lexicographic enumeration of all tuples in `0..radix` of a fixed length;
/// the first position is the most significant.
#[derive(Debug, Clone)]
pub struct Odometer {
    digits: Vec<usize>,
    radix: usize,
    started: bool,
    done: bool,
}

impl Odometer {
    pub fn new(len: usize, radix: usize) -> Self {
        Odometer {
            digits: vec![0; len],
            radix,
            started: false,
            done: radix == 0 && len > 0,
        }
    }

    /// Advances to the next tuple, returning `None` after the last one.
    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.digits);
        }
        for p in (0..self.digits.len()).rev() {
            self.digits[p] += 1;
            if self.digits[p] < self.radix {
                return Some(&self.digits);
            }
            self.digits[p] = 0;
        }
        self.done = true;
        None
    }
}

/// Lexicographic enumeration of the product of half-open ranges.
#[derive(Debug, Clone)]
pub struct RangeProduct {
    ranges: Vec<(usize, usize)>,
    digits: Vec<usize>,
    started: bool,
    done: bool,
}

impl RangeProduct {
    pub fn new(ranges: Vec<(usize, usize)>) -> Self {
        let done = ranges.iter().any(|&(lo, hi)| lo >= hi);
        let digits = ranges.iter().map(|&(lo, _)| lo).collect();
        RangeProduct {
            ranges,
            digits,
            started: false,
            done,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.digits);
        }
        for p in (0..self.digits.len()).rev() {
            self.digits[p] += 1;
            if self.digits[p] < self.ranges[p].1 {
                return Some(&self.digits);
            }
            self.digits[p] = self.ranges[p].0;
        }
        self.done = true;
        None
    }
}
