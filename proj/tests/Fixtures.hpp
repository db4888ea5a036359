#pragma once

// Shared circuit sources used across the test suite.

namespace fixtures {

inline constexpr auto bellQasm = R"(OPENQASM 2.0;
include "qelib1.inc";
qreg q[2];
creg c[2];
h q[1];
cx q[1],q[0];
)";

// prepares (|010> + |100> - sqrt(2)|110>)/2  (amplitudes over q2 q1 q0)
inline constexpr auto psiQasm = R"(OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
ry(2.0943951023931953) q[2];
x q[1];
ry(0.61547970867038734) q[1];
cx q[2],q[1];
ry(-0.61547970867038734) q[1];
cx q[2],q[1];
z q[2];
)";

// textbook three-qubit Fourier transform, swap as a primitive
inline constexpr auto qftDirectQasm = R"(OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
h q[2];
cp(pi/2) q[1],q[2];
cp(pi/4) q[0],q[2];
h q[1];
cp(pi/2) q[0],q[1];
h q[0];
swap q[0],q[2];
)";

// the same transform compiled to {h, p, cx}, barriers between stages
inline constexpr auto qftCompiledQasm = R"(OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
h q[2];
barrier q;
p(pi/4) q[1];
cx q[1],q[2];
p(-pi/4) q[2];
cx q[1],q[2];
p(pi/4) q[2];
barrier q;
p(pi/8) q[0];
cx q[0],q[2];
p(-pi/8) q[2];
cx q[0],q[2];
p(pi/8) q[2];
barrier q;
h q[1];
barrier q;
p(pi/4) q[0];
cx q[0],q[1];
p(-pi/4) q[1];
cx q[0],q[1];
p(pi/4) q[1];
barrier q;
h q[0];
barrier q;
cx q[0],q[2];
cx q[2],q[0];
cx q[0],q[2];
)";

inline constexpr auto dampModel = "channel=amplitude_damping p=0.3 on=0 after=end\n";

} // namespace fixtures
