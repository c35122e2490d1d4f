//! Operation counting for the kernels.
//!
//! The DPU kernels are generic over an [`OpTally`]. Production callers pass
//! [`NoTally`], which compiles away; the cost model's default instruction
//! counts are obtained by running the same code with a [`CountingTally`].

/// Sink for executed basic operations.
pub trait OpTally {
    /// `n` ALU operations (xor, and, or, not, shift, rotate, add).
    fn alu(&mut self, n: u64);
    /// `n` loads of `width` bytes each (table lookups, key and state reads).
    fn load(&mut self, n: u64, width: u64);
    /// `n` stores of `width` bytes each.
    fn store(&mut self, n: u64, width: u64);
}

#[derive(Debug, Default, Clone, Copy)]
pub struct NoTally;

impl OpTally for NoTally {
    #[inline(always)]
    fn alu(&mut self, _n: u64) {}
    #[inline(always)]
    fn load(&mut self, _n: u64, _width: u64) {}
    #[inline(always)]
    fn store(&mut self, _n: u64, _width: u64) {}
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct CountingTally {
    pub alu_ops: u64,
    pub loads: u64,
    pub stores: u64,
    pub bytes_loaded: u64,
    pub bytes_stored: u64,
}

impl CountingTally {
    /// Every counted operation is one DPU instruction.
    pub fn instructions(&self) -> u64 {
        self.alu_ops + self.loads + self.stores
    }

    /// Bytes touched by loads and stores.
    pub fn memory_bytes(&self) -> u64 {
        self.bytes_loaded + self.bytes_stored
    }
}

impl OpTally for CountingTally {
    fn alu(&mut self, n: u64) {
        self.alu_ops += n;
    }

    fn load(&mut self, n: u64, width: u64) {
        self.loads += n;
        self.bytes_loaded += n * width;
    }

    fn store(&mut self, n: u64, width: u64) {
        self.stores += n;
        self.bytes_stored += n * width;
    }
}
