//! Porter stemming (1980), steps 1a through 5b, matching the reference
//! implementation's behavior including its two documented step-2 rule
//! adjustments ("bli" -> "ble" instead of "abli" -> "able", plus
//! "logi" -> "log").

/// Stems a lowercase ASCII word. Tokens that are not pure lowercase ASCII
/// letters, or are shorter than three characters, come back unchanged.
pub fn porter_stem(word: &str) -> String {
    if word.len() <= 2 || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    let mut s = Stemmer {
        b: word.as_bytes().to_vec(),
        end: word.len(),
        stem: 0,
    };
    s.step1ab();
    s.step1c();
    s.step2();
    s.step3();
    s.step4();
    s.step5();
    s.b.truncate(s.end);
    String::from_utf8(s.b).expect("ascii in, ascii out")
}

/// `b[..end]` is the current word; `b[..stem]` is the stem left of the most
/// recently matched suffix.
struct Stemmer {
    b: Vec<u8>,
    end: usize,
    stem: usize,
}

impl Stemmer {
    fn cons(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => {
                if i == 0 {
                    true
                } else {
                    !self.cons(i - 1)
                }
            }
            _ => true,
        }
    }

    /// Number of vowel-consonant sequences in `b[..limit]`.
    fn measure(&self, limit: usize) -> usize {
        let mut n = 0;
        let mut i = 0;
        loop {
            if i >= limit {
                return n;
            }
            if !self.cons(i) {
                break;
            }
            i += 1;
        }
        i += 1;
        loop {
            loop {
                if i >= limit {
                    return n;
                }
                if self.cons(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
            n += 1;
            loop {
                if i >= limit {
                    return n;
                }
                if !self.cons(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
        }
    }

    fn m(&self) -> usize {
        self.measure(self.stem)
    }

    fn vowel_in_stem(&self) -> bool {
        (0..self.stem).any(|i| !self.cons(i))
    }

    /// True when `b[i]` repeats `b[i-1]` as a consonant pair.
    fn double_cons(&self, i: usize) -> bool {
        i >= 1 && self.b[i] == self.b[i - 1] && self.cons(i)
    }

    /// consonant-vowel-consonant ending at `i`, final consonant not w, x or y.
    fn cvc(&self, i: usize) -> bool {
        if i < 2 || !self.cons(i) || self.cons(i - 1) || !self.cons(i - 2) {
            return false;
        }
        !matches!(self.b[i], b'w' | b'x' | b'y')
    }

    /// On match, records the stem boundary for the condition checks.
    fn ends(&mut self, suffix: &[u8]) -> bool {
        if suffix.len() > self.end || &self.b[self.end - suffix.len()..self.end] != suffix {
            return false;
        }
        self.stem = self.end - suffix.len();
        true
    }

    fn set_to(&mut self, s: &[u8]) {
        self.b.truncate(self.stem);
        self.b.extend_from_slice(s);
        self.end = self.b.len();
    }

    fn replace_if_m(&mut self, s: &[u8]) {
        if self.m() > 0 {
            self.set_to(s);
        }
    }

    fn step1ab(&mut self) {
        if self.b[self.end - 1] == b's' {
            if self.ends(b"sses") {
                self.end -= 2;
            } else if self.ends(b"ies") {
                self.set_to(b"i");
            } else if self.b[self.end - 2] != b's' {
                self.end -= 1;
            }
        }
        if self.ends(b"eed") {
            if self.m() > 0 {
                self.end -= 1;
            }
        } else if (self.ends(b"ed") || self.ends(b"ing")) && self.vowel_in_stem() {
            self.end = self.stem;
            if self.ends(b"at") {
                self.set_to(b"ate");
            } else if self.ends(b"bl") {
                self.set_to(b"ble");
            } else if self.ends(b"iz") {
                self.set_to(b"ize");
            } else if self.double_cons(self.end - 1) {
                if !matches!(self.b[self.end - 2], b'l' | b's' | b'z') {
                    self.end -= 1;
                }
            } else {
                self.stem = self.end;
                if self.m() == 1 && self.cvc(self.end - 1) {
                    self.set_to(b"e");
                }
            }
        }
    }

    fn step1c(&mut self) {
        if self.ends(b"y") && self.vowel_in_stem() {
            self.b[self.end - 1] = b'i';
        }
    }

    fn step2(&mut self) {
        if self.end < 2 {
            return;
        }
        match self.b[self.end - 2] {
            b'a' => {
                if self.ends(b"ational") {
                    self.replace_if_m(b"ate");
                } else if self.ends(b"tional") {
                    self.replace_if_m(b"tion");
                }
            }
            b'c' => {
                if self.ends(b"enci") {
                    self.replace_if_m(b"ence");
                } else if self.ends(b"anci") {
                    self.replace_if_m(b"ance");
                }
            }
            b'e' => {
                if self.ends(b"izer") {
                    self.replace_if_m(b"ize");
                }
            }
            b'l' => {
                if self.ends(b"bli") {
                    self.replace_if_m(b"ble");
                } else if self.ends(b"alli") {
                    self.replace_if_m(b"al");
                } else if self.ends(b"entli") {
                    self.replace_if_m(b"ent");
                } else if self.ends(b"eli") {
                    self.replace_if_m(b"e");
                } else if self.ends(b"ousli") {
                    self.replace_if_m(b"ous");
                }
            }
            b'o' => {
                if self.ends(b"ization") {
                    self.replace_if_m(b"ize");
                } else if self.ends(b"ation") {
                    self.replace_if_m(b"ate");
                } else if self.ends(b"ator") {
                    self.replace_if_m(b"ate");
                }
            }
            b's' => {
                if self.ends(b"alism") {
                    self.replace_if_m(b"al");
                } else if self.ends(b"iveness") {
                    self.replace_if_m(b"ive");
                } else if self.ends(b"fulness") {
                    self.replace_if_m(b"ful");
                } else if self.ends(b"ousness") {
                    self.replace_if_m(b"ous");
                }
            }
            b't' => {
                if self.ends(b"aliti") {
                    self.replace_if_m(b"al");
                } else if self.ends(b"iviti") {
                    self.replace_if_m(b"ive");
                } else if self.ends(b"biliti") {
                    self.replace_if_m(b"ble");
                }
            }
            b'g' => {
                if self.ends(b"logi") {
                    self.replace_if_m(b"log");
                }
            }
            _ => {}
        }
    }

    fn step3(&mut self) {
        match self.b[self.end - 1] {
            b'e' => {
                if self.ends(b"icate") {
                    self.replace_if_m(b"ic");
                } else if self.ends(b"ative") {
                    self.replace_if_m(b"");
                } else if self.ends(b"alize") {
                    self.replace_if_m(b"al");
                }
            }
            b'i' => {
                if self.ends(b"iciti") {
                    self.replace_if_m(b"ic");
                }
            }
            b'l' => {
                if self.ends(b"ical") {
                    self.replace_if_m(b"ic");
                } else if self.ends(b"ful") {
                    self.replace_if_m(b"");
                }
            }
            b's' => {
                if self.ends(b"ness") {
                    self.replace_if_m(b"");
                }
            }
            _ => {}
        }
    }

    fn step4(&mut self) {
        if self.end < 2 {
            return;
        }
        let matched = match self.b[self.end - 2] {
            b'a' => self.ends(b"al"),
            b'c' => self.ends(b"ance") || self.ends(b"ence"),
            b'e' => self.ends(b"er"),
            b'i' => self.ends(b"ic"),
            b'l' => self.ends(b"able") || self.ends(b"ible"),
            b'n' => {
                self.ends(b"ant")
                    || self.ends(b"ement")
                    || self.ends(b"ment")
                    || self.ends(b"ent")
            }
            b'o' => {
                (self.ends(b"ion")
                    && self.stem >= 1
                    && matches!(self.b[self.stem - 1], b's' | b't'))
                    || self.ends(b"ou")
            }
            b's' => self.ends(b"ism"),
            b't' => self.ends(b"ate") || self.ends(b"iti"),
            b'u' => self.ends(b"ous"),
            b'v' => self.ends(b"ive"),
            b'z' => self.ends(b"ize"),
            _ => false,
        };
        if matched && self.m() > 1 {
            self.end = self.stem;
        }
    }

    fn step5(&mut self) {
        self.stem = self.end;
        if self.b[self.end - 1] == b'e' {
            let a = self.m();
            if a > 1 || (a == 1 && !self.cvc(self.end - 2)) {
                self.end -= 1;
            }
        }
        self.stem = self.end;
        if self.b[self.end - 1] == b'l' && self.double_cons(self.end - 1) && self.m() > 1 {
            self.end -= 1;
        }
    }
}
