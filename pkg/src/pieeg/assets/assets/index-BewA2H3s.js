(function(){const t=document.createElement("link").relList;if(t&&t.supports&&t.supports("modulepreload"))return;for(const o of document.querySelectorAll('link[rel="modulepreload"]'))r(o);new MutationObserver(o=>{for(const s of o)if(s.type==="childList")for(const l of s.addedNodes)l.tagName==="LINK"&&l.rel==="modulepreload"&&r(l)}).observe(document,{childList:!0,subtree:!0});function n(o){const s={};return o.integrity&&(s.integrity=o.integrity),o.referrerPolicy&&(s.referrerPolicy=o.referrerPolicy),o.crossOrigin==="use-credentials"?s.credentials="include":o.crossOrigin==="anonymous"?s.credentials="omit":s.credentials="same-origin",s}function r(o){if(o.ep)return;o.ep=!0;const s=n(o);fetch(o.href,s)}})();const R=new Set(["status","samples","spectrum","event","pin_state"]);function F(e){let t;try{t=JSON.parse(e)}catch{return null}if(typeof t!="object"||t===null)return null;const n=t;if(n.kind==="ack"&&typeof n.cmd_seq=="number"&&typeof n.ok=="boolean")return n;if(typeof n.kind!="string"||!R.has(n.kind)||typeof n.seq!="number")return null;switch(n.kind){case"status":return typeof n.config=="object"&&n.config!==null?n:null;case"samples":return Array.isArray(n.uv)&&typeof n.period_ns=="number"?n:null;case"spectrum":return Array.isArray(n.amplitudes_uv)&&typeof n.bin_hz=="number"?n:null;case"event":return typeof n.detector_id=="string"&&typeof n.t_ns=="number"?n:null;case"pin_state":return typeof n.pin=="number"&&typeof n.level=="boolean"?n:null}return null}const q=(e,t)=>({kind:"control",cmd:"set_threshold",detector_id:e,threshold_uv:t}),D=(e,t,n)=>({kind:"control",cmd:"set_band",detector_id:e,low_hz:t,high_hz:n}),z=(e,t)=>({kind:"control",cmd:"enable_detector",detector_id:e,enabled:t});class j{constructor(t,n){this.url=t,this.hooks=n}url;hooks;socket=null;closed=!1;retryMs=500;start(){this.closed=!1,this.open()}open(){const t=new WebSocket(this.url);this.socket=t,t.onopen=()=>{this.retryMs=500,this.hooks.onOpen()},t.onmessage=n=>{const r=F(String(n.data));r!==null&&(r.kind==="ack"?this.hooks.onAck(r):this.hooks.onServerMessage(r))},t.onclose=()=>{this.hooks.onClose(),!this.closed&&(setTimeout(()=>this.open(),this.retryMs),this.retryMs=Math.min(this.retryMs*2,5e3))},t.onerror=()=>t.close()}send(t){return this.socket===null||this.socket.readyState!==WebSocket.OPEN?!1:(this.socket.send(JSON.stringify(t)),!0)}stop(){this.closed=!0,this.socket?.close()}}const g=10;function T(){return{connected:!1,config:null,overlays:{},trace:[],spectrum:null,pins:{31:{level:!1,flashUntilMs:0},35:{level:!1,flashUntilMs:0}},ticker:[],tally:{hits:0,attempts:0},preview:null,pending:[],sentCommands:0,lastSeq:0,lastError:null,banner:null}}function H(e){return{...T(),connected:!0,tally:e.tally}}function P(e){return{...e,connected:!1,banner:"disconnected - reconnecting"}}function V(e,t){const n={};for(const r of t.detectors??[])n[r.detector_id]=r;return{...e,config:t,overlays:n,banner:null}}function W(e,t){const n=e.config?.pin_map?.[t];return n?n.pin:null}function X(e,t){return e.config?.pin_map?.[t]?.pulse_ms??500}function Y(e,t,n){if(t.seq<=e.lastSeq&&t.kind!=="status")return e;const r={...e,lastSeq:Math.max(e.lastSeq,t.seq)};switch(t.kind){case"status":return V(r,t.config);case"samples":{const o=t.uv.map((c,a)=>({tNs:t.t0_ns+a*t.period_ns,uv:c})),s=[...e.trace,...o],l=o.length?o[o.length-1].tNs-g*1e9:-1/0;return{...r,trace:s.filter(c=>c.tNs>=l)}}case"spectrum":return{...r,spectrum:{tEndNs:t.t_end_ns,binHz:t.bin_hz,amplitudesUv:t.amplitudes_uv}};case"event":{const o=[...e.ticker,{tNs:t.t_ns,detectorId:t.detector_id,peakUv:t.peak_uv}].slice(-50),s=W(e,t.detector_id),l={...e.pins};if(s!==null){const c=n+X(e,t.detector_id);l[s]={level:!0,flashUntilMs:c}}return{...r,ticker:o,pins:l}}case"pin_state":{const o={...e.pins},s=o[t.pin]??{level:!1,flashUntilMs:0};return o[t.pin]={...s,level:t.level},{...r,pins:o}}}}function _(e,t){const n=e.sentCommands+1;let r=null;return t.cmd==="set_threshold"?r={detectorId:t.detector_id,cmd:t.cmd,thresholdUv:t.threshold_uv}:t.cmd==="set_band"&&(r={detectorId:t.detector_id,cmd:t.cmd,lowHz:t.low_hz,highHz:t.high_hz}),{state:{...e,sentCommands:n,preview:r,pending:[...e.pending,{cmdSeq:n,preview:r}],lastError:null},command:t}}function J(e,t){const n=e.pending.filter(o=>o.cmdSeq!==t.cmd_seq),r=e.pending.find(o=>o.cmdSeq===t.cmd_seq);if(t.ok){const o=e.preview===r?.preview?null:e.preview;return{...e,pending:n,preview:o,lastError:null}}return{...e,pending:n,preview:null,lastError:t.reason??"rejected"}}function K(e){return{...e,tally:{hits:e.tally.hits+1,attempts:e.tally.attempts+1}}}function G(e){return{...e,tally:{hits:e.tally.hits,attempts:e.tally.attempts+1}}}function Z(e){return{...e,tally:{hits:0,attempts:0}}}function Q(e){const{hits:t,attempts:n}=e.tally;return n===0?"0/0":`${t}/${n} (${(100*t/n).toFixed(0)}%)`}function x(e){const{hits:t,attempts:n}=e.tally;return`hits,attempts
${t},${n}
`}const v=30;function k(e,t){const n=Math.min(t/e.maxUv,1);return e.y+e.height*(1-n)}function A(e,t){const n=1-(t-e.y)/e.height;return Math.max(0,Math.min(1,n))*e.maxUv}function S(e,t){return e.x+t/v*e.width}function C(e,t){const n=(t-e.x)/e.width;return Math.max(0,Math.min(1,n))*v}function ee(e,t){if(t!==null)return t;let n=10;if(e.spectrum){const r=Math.ceil(v/e.spectrum.binHz);for(let o=0;o<=r&&o<e.spectrum.amplitudesUv.length;o++)n=Math.max(n,e.spectrum.amplitudesUv[o])}for(const r of Object.values(e.overlays))r.threshold_uv!==null&&(n=Math.max(n,r.threshold_uv*1.2));return n*1.1}const te={bandA:"rgba(80, 220, 120, 0.18)",bandB:"rgba(120, 170, 255, 0.18)"},ne={bandA:"#ff5252",bandB:"#ff9e40"};function U(e,t){return t[e]??"#cccccc"}function oe(e,t,n,r,o,s){e.save(),e.fillStyle="#10141a",e.fillRect(n,r,o,s),e.strokeStyle="#2a3442",e.strokeRect(n,r,o,s);const l=t.trace;if(l.length>1){const a=l[l.length-1].tNs-g*1e9;let f=10;for(const p of l)f=Math.max(f,Math.abs(p.uv));e.beginPath(),e.strokeStyle="#6fe3ff",e.lineWidth=1.2;for(let p=0;p<l.length;p++){const m=n+(l[p].tNs-a)/(g*1e9)*o,b=r+s/2-l[p].uv/f*(s/2-4);p===0?e.moveTo(m,b):e.lineTo(m,b)}e.stroke(),e.fillStyle="#8a97a8",e.font="11px monospace",e.fillText(`+/- ${f.toFixed(0)} uV, last ${g} s (filtered)`,n+6,r+14)}else e.fillStyle="#8a97a8",e.font="12px monospace",e.fillText("waiting for samples...",n+8,r+s/2);e.restore()}function re(e,t,n){const{x:r,y:o,width:s,height:l}=n;e.save(),e.fillStyle="#10141a",e.fillRect(r,o,s,l),e.strokeStyle="#2a3442",e.strokeRect(r,o,s,l);for(const c of Object.values(t.overlays)){e.fillStyle=U(c.detector_id,te);const a=S(n,c.band_low_hz),f=S(n,c.band_high_hz);e.fillRect(a,o,f-a,l),e.strokeStyle=e.fillStyle.replace("0.18","0.7"),e.beginPath(),e.moveTo(a,o),e.lineTo(a,o+l),e.moveTo(f,o),e.lineTo(f,o+l),e.stroke()}if(t.spectrum){const{binHz:c,amplitudesUv:a}=t.spectrum,f=Math.min(Math.floor(v/c)+1,a.length),p=Math.max(1,s/v*c-2);e.fillStyle="#d9e2ec";for(let m=0;m<f;m++){const b=S(n,m*c),B=k(n,a[m]);e.fillRect(b-p/2,B,p,o+l-B)}}for(const c of Object.values(t.overlays)){if(c.threshold_uv===null)continue;const a=k(n,c.threshold_uv);e.strokeStyle=U(c.detector_id,ne),e.lineWidth=c.enabled?2:1,e.setLineDash(c.enabled?[]:[6,4]),e.beginPath(),e.moveTo(r,a),e.lineTo(r+s,a),e.stroke(),e.setLineDash([]),e.font="11px monospace",e.fillStyle=e.strokeStyle,e.fillText(`${c.detector_id} ${c.threshold_uv.toFixed(1)} uV`,r+s-150,a-4)}if(t.preview?.thresholdUv!==void 0){const c=k(n,t.preview.thresholdUv);e.strokeStyle="#ffffff",e.setLineDash([2,3]),e.beginPath(),e.moveTo(r,c),e.lineTo(r+s,c),e.stroke(),e.setLineDash([])}e.fillStyle="#8a97a8",e.font="11px monospace",e.fillText(`0-${v} Hz, full scale ${n.maxUv.toFixed(0)} uV`,r+6,o+14),e.restore()}const se=1e3/30;let i=T(),$=null,w=!0,L=0;const u=document.getElementById("scope"),M=u.getContext("2d"),O=document.getElementById("banner"),le=document.getElementById("ticker"),ie=document.getElementById("tally"),ce=document.getElementById("error"),ae={31:document.getElementById("pin31"),35:document.getElementById("pin35")};function E(){w=!0}function h(e){i=e,E()}const de=`${location.protocol==="https:"?"wss":"ws"}://${location.host}/stream`,y=new j(de,{onOpen:()=>h(H(i)),onClose:()=>h(P(i)),onServerMessage:e=>h(Y(i,e,performance.now())),onAck:e=>h(J(i,e))});y.start();function I(){const t=Math.floor(u.height*.42);return{x:8,y:t+16,width:u.width-16,height:u.height-t-24,maxUv:ee(i,$)}}let d=null;function ue(e,t){let n=null,r=12;for(const o of Object.values(i.overlays)){if(o.threshold_uv===null)continue;const s=t.y+t.height*(1-Math.min(o.threshold_uv/t.maxUv,1)),l=Math.abs(s-e);l<r&&(n=o.detector_id,r=l)}return n}function he(e,t){let n=null,r=8;for(const o of Object.values(i.overlays))for(const s of["low","high"]){const l=s==="low"?o.band_low_hz:o.band_high_hz,c=t.x+l/30*t.width,a=Math.abs(c-e);a<r&&(n={detectorId:o.detector_id,edge:s},r=a)}return n}u.addEventListener("pointerdown",e=>{const t=u.getBoundingClientRect(),n=e.clientX-t.left,r=e.clientY-t.top,o=I();if(r<o.y)return;const s=ue(r,o);if(s!==null){d={kind:"threshold",detectorId:s,uv:A(o,r)},u.setPointerCapture(e.pointerId);return}const l=he(n,o);l!==null&&(d={...l,kind:"band_edge",hz:C(o,n)},u.setPointerCapture(e.pointerId))});u.addEventListener("pointermove",e=>{if(d===null)return;const t=u.getBoundingClientRect(),n=I();d.kind==="threshold"?(d.uv=A(n,e.clientY-t.top),h({...i,preview:{detectorId:d.detectorId,cmd:"set_threshold",thresholdUv:d.uv}})):(d.hz=C(n,e.clientX-t.left),E())});u.addEventListener("pointerup",()=>{if(d!==null){if(d.kind==="threshold"){const{state:e,command:t}=_(i,q(d.detectorId,Math.max(.1,Math.round(d.uv*10)/10)));h(e),y.send(t)}else{const e=i.overlays[d.detectorId];if(e){const t=d.edge==="low"?d.hz:e.band_low_hz,n=d.edge==="high"?d.hz:e.band_high_hz,{state:r,command:o}=_(i,D(d.detectorId,Math.round(t*10)/10,Math.round(n*10)/10));h(r),y.send(o)}}d=null}});document.getElementById("enableA").addEventListener("click",()=>{const e=i.overlays.bandA,{state:t,command:n}=_(i,z("bandA",!(e?.enabled??!1)));h(t),y.send(n)});document.getElementById("enableB").addEventListener("click",()=>{const e=i.overlays.bandB,{state:t,command:n}=_(i,z("bandB",!(e?.enabled??!1)));h(t),y.send(n)});document.getElementById("hit").addEventListener("click",()=>h(K(i)));document.getElementById("miss").addEventListener("click",()=>h(G(i)));document.getElementById("resetTally").addEventListener("click",()=>h(Z(i)));document.getElementById("exportTally").addEventListener("click",()=>{const e=new Blob([x(i)],{type:"text/plain"}),t=document.createElement("a");t.href=URL.createObjectURL(e),t.download="tally.txt",t.click()});document.getElementById("pinMax").addEventListener("change",e=>{const t=e.target.value.trim();$=t===""?null:Math.max(1,Number(t)),E()});function N(e){requestAnimationFrame(N);const t=Object.values(i.pins).some(s=>s.level||s.flashUntilMs>performance.now());if(!w&&!t||e-L<se)return;L=e,w=!1,M.clearRect(0,0,u.width,u.height);const n=8;oe(M,i,n,n,u.width-2*n,Math.floor(u.height*.42)),re(M,i,I()),O.textContent=i.banner??(i.connected?"":"connecting..."),O.style.display=i.banner||!i.connected?"block":"none",ce.textContent=i.lastError??"",ie.textContent=Q(i),le.textContent=i.ticker.slice(-6).map(s=>`${(s.tNs/1e9).toFixed(2)}s ${s.detectorId} ${s.peakUv.toFixed(1)}uV`).join(`
`);for(const[s,l]of Object.entries(ae)){const c=i.pins[Number(s)],a=c&&(c.level||c.flashUntilMs>performance.now());l.classList.toggle("on",!!a)}const r=i.overlays.bandA,o=i.overlays.bandB;document.getElementById("enableA").textContent=`bandA ${r?.enabled?"on":"off"}${r?.threshold_uv===null?" (uncalibrated)":""}`,document.getElementById("enableB").textContent=`bandB ${o?.enabled?"on":"off"}${o?.threshold_uv===null?" (uncalibrated)":""}`}requestAnimationFrame(N);
