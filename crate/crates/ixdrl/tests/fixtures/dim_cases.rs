// @generated by tools/dim_oracles.py; do not edit.

pub const VALUE: &[(f64, f64, f64, f64)] = &[
    (2.0, 2.0, 6.0, -1.0),
    (6.0, 2.0, 6.0, 1.0),
    (4.0, 2.0, 6.0, 0.0),
    (3.0, 3.0, 3.0, 0.0),
    (-1.5, -2.0, 0.5, -0.6),
    (-0.7835617949418232, -3.103591027960558, 4.9987132859120855, -0.42731619471601046),
    (2.833150683898733, 0.8666089882182408, 3.3510052202464955, 0.5831143763046305),
    (-3.2294050713494746, -3.875187623973142, -2.3428780882527045, -0.1571121401133312),
    (2.4531201924765336, 0.19942113700221142, 2.860251925366624, 0.6939814927950751),
    (3.1792395564387723, 1.4448694893140175, 4.362641121324758, 0.18883194839312245),
    (-2.5524145058516994, -3.0427963187181906, 0.08317129163728154, -0.686252786982187),
    (2.752665266731843, 1.7733786509611207, 2.822091623310392, 0.8675970291031614),
];

pub const CONFIDENCE_DISCRETE: &[(&[f64], f64)] = &[
    (&[1.0], 1.0),
    (&[0.5, 0.5], -1.0),
    (&[1.0, 0.0], 1.0),
    (&[0.25, 0.25, 0.25, 0.25], -1.0),
    (&[0.5, 0.5, 0.0, 0.0], 0.0),
    (&[0.7, 0.2, 0.1], -0.4596933983241951),
    (&[0.9, 0.05, 0.05, 0.0], 0.4310044064107188),
    (&[0.4710070739912403, 0.5289929260087597], -0.9951464192448989),
    (&[0.9700345329402129, 0.020163662083471524, 0.009801804976315501], 0.7204409069814068),
    (&[0.1292652335411506, 0.17845848304077752, 0.31929070429137196, 0.3008150668958513, 0.07217051223084864], -0.8486082982194831),
    (&[0.3519958891890717, 0.2561274975136688, 0.11378451269083552, 0.0790360188577022, 0.13733000507381435, 0.06172607667490742], -0.7958268994429332),
    (&[0.1520642474432593, 0.10186932291396589, 0.0945344210194863, 0.025994864323525213, 0.00021870711337450827, 0.1055722469978691, 0.020235315641321357, 0.4946971824266395, 0.004813692120558868], -0.39169940447771223),
    (&[3.0152134133407403e-10, 0.006850293815793294, 0.27940428699609815, 0.7137454188865872], 0.08951378659495601),
];

pub const CONFIDENCE_GAUSSIAN: &[(&[f64], &[f64], &[f64], &[f64], f64)] = &[
    (&[0.0], &[1e-12], &[-1.0], &[1.0], 0.9999999999958673),
    (&[0.0], &[0.48394144903828673], &[-1.0], &[1.0], -1.0),
    (&[0.3], &[0.24197072451914337], &[-1.0], &[1.0], 0.0),
    (&[-0.4177738380522258], &[0.4325025052630621], &[-1.0], &[1.0], -0.7874166642371851),
    (&[-0.5638216710837725], &[0.3064470602801018], &[-1.0], &[1.0], -0.2664633743982423),
    (&[-0.354738049675029, -0.1216400774699018], &[0.4674449563397191, 0.2615089347064447], &[-1.0, -1.0], &[1.0, 1.0], -0.04390592922139036),
    (&[0.965395534147546, -0.6308389685655647, -0.29778739497078366], &[0.0697675239103142, 0.018777064352534338, 0.33152330733295754], &[-1.0, -1.0, -1.0], &[1.0, 1.0, 1.0], 0.992336156899473),
];

pub const GOAL: &[(f64, f64, f64, f64, f64)] = &[
    (0.5, 0.5, f64::NAN, 100.0, 0.0),
    (0.2, 0.1, 0.0, 100.0, 0.9950371902099892),
    (0.6, 0.5, f64::NAN, 100.0, 0.9950371902099892),
    (0.4, 0.5, f64::NAN, 100.0, -0.9950371902099892),
    (0.5, 0.5, 0.5, 100.0, 0.0),
    (0.6, 0.5, 0.4, 1.0, 0.09950371902099885),
    (0.3, 0.5, 0.9, 10.0, -0.7071067811865477),
    (0.5278206963001444, 0.4397322774821457, f64::NAN, 1.0, 0.0877486308949658),
    (0.024256149180875042, 0.12410611317243359, 0.5618515784882837, 1.0, 0.06893342117609769),
    (0.22565847207346845, 0.24510683586283188, f64::NAN, 1.0, -0.01944468676900779),
    (0.6449805191653848, 0.4104836588886557, 0.6969202097457012, 100.0, 0.999795971605402),
    (0.5628890263345468, 0.10938250001196603, f64::NAN, 1.0, 0.4130186317365244),
    (0.5154799925248431, 0.3433810030427691, 0.4909371857795921, 100.0, 0.9995464862723378),
];

pub const INCONGRUITY: &[(f64, f64, f64, f64, f64, f64)] = &[
    (1.0, 2.0, 2.0, 0.9, 10.0, 0.07999999999999999),
    (0.5, 2.0, 1.5, 0.5, 3.0, 0.0),
    (0.0, 1.0, 1.0, 1.0, 2.0, 0.0),
    (1.0, 0.0, 0.0, 0.9, 2.0, 0.5),
    (-1.0, 0.0, 0.0, 0.9, 0.5, -1.0),
    (0.0, 0.0, 0.0, 0.9, 0.0, 0.0),
    (0.5, 2.0, 1.0, 0.99, 4.0, 0.37),
    (-0.21056287640275095, 0.3769928689964086, -2.371641892761833, 0.7004012881596451, 2.6126971996983093, 0.9282075656188549),
    (0.3551063748661474, -2.1715971747801035, 1.1133892131735852, 0.8829450057932369, 3.4858038575753447, -0.7675944567447307),
    (-0.44238408369683935, -0.7290411180145449, -1.7340085053613048, 0.9734287038836658, 1.5812509899000569, 0.36803447067846645),
    (0.6494323583587012, 2.019525776621802, -2.6536154161259757, 0.7999946652063631, 2.4835612684352233, 1.0),
    (-0.4725451236380387, 0.2866719483158975, -0.059985865978849695, 0.8445645214213691, 2.893130928974186, -0.05891413316896672),
    (0.27521938883102703, -1.3336086746369897, -2.5935589824341054, 0.8457522797577902, 1.6991243957338675, 1.0),
    (0.14563783883861192, -1.2730475566225463, -0.44905106612962076, 0.7529821178130709, 1.1864964133844897, -0.30669552489936286),
];

pub const RISK_POLICY: &[(&[f64], f64)] = &[
    (&[0.5, 0.5], -1.0),
    (&[1.0, 0.0], 1.0),
    (&[0.4, 0.4, 0.2], -1.0),
    (&[0.6, 0.3, 0.1], -0.4),
    (&[0.7, 0.2, 0.1], -1.1102230246251565e-16),
    (&[0.25, 0.25, 0.25, 0.25], -1.0),
    (&[0.7146655091875822, 0.2853344908124178], -0.14133796324967118),
    (&[0.10895505637288815, 0.39668765346270596, 0.49435729016440594], -0.8046607265966),
    (&[0.06592351109023349, 0.7304134141354549, 0.12703904012753556, 0.07662403464677618], 0.20674874801583876),
    (&[0.1065430050786766, 0.00018194178637681292, 0.016676103866486672, 9.502340653179558e-09, 5.6750042676723704e-05, 0.8765421897234426], 0.5399983692895318),
    (&[0.15200658779750767, 0.15521215421842802, 0.23216770976235204, 0.02008561660356609, 0.09915552211747009, 0.08307018875344456, 0.22102039999119896, 0.037281820756032584], -0.9777053804576938),
];

pub const RISK_VALUES: &[(&[f64], f64, f64)] = &[
    (&[1.0, 1.0], 2.0, -1.0),
    (&[0.0, 2.0], 2.0, 1.0),
    (&[1.0, 3.0], 4.0, 0.0),
    (&[0.0, 1.0, 0.5], 2.0, 0.0),
    (&[3.0, 3.0, 3.0], 0.0, -1.0),
    (&[-1.095229474308172, -1.2846429750868111, 1.5280027400876737, 0.07353307807700471], 4.0, 0.4063228575872424),
    (&[-1.328841803277446, -0.31516429170267335, 1.5102060489879756], 4.0, 0.41952392613271083),
    (&[-1.6849427716495735, 1.487062589117273, 1.9909605184378543, 1.4705818576012533, -1.2343103498189367], 4.0, 0.8379516450437139),
    (&[-1.2792821889534802, 1.4243096422746975], 4.0, 0.35179591561408885),
    (&[-1.784612147663092, 1.1276420892148296, -0.8688470086710605, 0.2308193106184535, -0.46360276626627295], 4.0, 0.4561271184389608),
    (&[-0.01598282488232039, -1.3523924832656067, -0.2917686872490859, 0.5298051252860456, 1.9332120933646673], 4.0, 0.642802288315137),
];

pub const STOCH_ATOMS: &[(&[f64], usize, f64)] = &[
    (&[1.0, 0.0, 0.0], 3, -1.0),
    (&[0.5, 0.0, 0.5], 3, -1.0),
    (&[0.5, 0.5, 0.0], 3, 1.0),
    (&[0.0, 1.0, 0.0], 3, -1.0),
    (&[0.3333333333333333, 0.3333333333333333, 0.3333333333333333], 3, 0.33333333333333304),
    (&[0.5, 0.5, 1.0, 0.0], 2, -1.0),
    (&[0.19021963901990446, 0.339129469832283, 0.19778380977942328, 0.14553794015286084, 0.12732914121552832], 5, 0.8778664944967298),
    (&[1.9413556557316786e-05, 0.028718499339361825, 0.05605425157240759, 0.2809561688271562, 0.0015677429835363236, 0.07365641941672824, 0.26723071066218407, 0.15810775326334214, 0.0362780772436464, 0.04064327493659615, 0.056767688198483685, 0.14620134464069412, 0.03486043684172913, 0.24444690869904226, 0.04529821156686252, 0.33865661662339214, 2.2249999665080424e-05, 0.0107395733397626, 0.0036539692691692953, 0.15065685252144612, 0.0030907543573193298, 0.022373082140917506, 6.827932668813654e-06, 0.016947959173847935, 0.47709272070846714, 0.000511288026214258, 0.013732264440344932, 0.01471862165496714, 0.025286655597312357, 0.007443147499036188, 0.11500894718071916, 0.008134497000206662, 0.32111707078621554, 0.2437745439811591, 0.11141499561577049, 0.2956065825920814, 0.10778461505284198, 0.0034599199423424915, 0.12196643342171135, 6.106405561511272e-05, 0.05199118335787164, 0.03504291960039736, 0.00951043240691187, 0.01938730997329714], 11, 0.4253419244698698),
    (&[0.0820977978998055, 0.06363586799603609, 0.08360947506467534, 0.037169228719846, 0.000639865924969195, 0.03537250696833747, 0.025507723978509284, 0.03297341619367634, 0.03519768763373243, 0.02256484733037395, 0.044678402313175665, 0.0184089273908722, 0.05651817339184271, 0.03923758149805905, 0.04514379664137881, 0.015822778778475096, 0.04318742589614022, 0.03692026386037229, 0.14957526134498877, 0.056053305776276804, 0.07568566539845681], 21, 0.5310674307462202),
    (&[0.03332357726915004, 0.0014654091158771614, 0.05852663486694546, 0.013682545746992094, 0.0035572569876962746, 0.0014123843840952992, 0.030533378972136094, 0.014460062293851168, 0.002396639719566815, 0.041384615281604364, 0.03322759970151625, 0.03682494163172213, 0.012871896815617831, 0.008311469773130839, 0.0021665287676430243, 0.001812629309645478, 0.003492243348446704, 0.014019631944118378, 0.022848523532948452, 0.022095991337332612, 0.09011320830438047, 0.0074868480416952436, 0.006754468234353737, 0.0018814933935695668, 0.020188067691227222, 0.030191208143859224, 0.09996118012273895, 0.004911170678786463, 0.007072303540299599, 0.01567092654236873, 0.005408392566404021, 0.001398825929622631, 0.0022431791346851637, 0.006091053507667363, 0.003053173160985729, 0.00041493005865108994, 0.0022801382187430217, 0.0950129171284019, 0.024481879998271897, 0.014184364594017082, 0.03587048692825524, 0.01797837639781035, 0.013563153869204552, 0.05695281781893243, 0.005459104643191292, 0.015512688730119453, 0.0022434715760234225, 4.374544824276201e-05, 0.003448332436872427, 0.009674832241584002, 0.04203930011899828, 0.004058984706606321, 0.0027057134203946503, 0.015654691570447948, 0.031900592522858845, 0.006552240513661888, 0.005157742128501116, 0.003925903268107649, 0.004460783471407974, 0.019337218036350495, 0.07504432553885607, 0.0018633003497230934, 0.04813832141173536, 0.03427301421208237, 0.033702597290503004, 0.019995520034400846, 0.00629595870073317, 0.028454252862268218, 0.027163073958726556, 0.005426252506231863, 0.08042140036756139, 0.001726576049734637, 0.03853371710764029, 0.0114795179574677, 0.005341887972190711, 0.0014227752263973295, 0.06653035355869961, 0.0004438353200190705, 0.01320778284197648, 0.01457697690087472, 0.03844698527265105, 0.006898172679022013, 0.02423461176186312, 0.022731870257712443, 0.0041567400762282936, 0.020312080952292262, 0.03085164036650767, 0.05709958420078186, 0.006663449844135532, 0.044070733923634406, 0.03498925555386728, 0.00560061711289539, 0.007074262647507773, 0.001671842511732175, 0.023534541721101865, 0.0004027609094136991, 0.008257016151197167, 0.009018503841100258, 0.006744360976577173, 0.0038860583203660214, 0.021737977875236483, 0.013821623238016788], 51, 0.8770767984106339),
    (&[0.8334485932684407, 0.06031771589071709, 0.1062336908408422, 0.02678815689705957, 0.003715923530132655, 0.9694959195728078, 0.012184581067473589, 0.0002940948886766546, 0.9875213240438497, 0.056741603056173, 0.8389507752590121, 0.10430762168481487], 3, -0.48421018333873495),
    (&[0.10691800952987339, 0.19580362741370458, 0.19750543928047967, 0.27714993971524343, 0.07727090761714284, 0.053704329708234036, 0.09164774673532215, 0.08804296220807634, 0.19223156287955673, 0.11792454168163816, 0.1964962171352933, 0.08992704451680997, 0.12244071723123423, 0.19293695434739133, 0.1820872508461159, 0.1668601771525055, 0.13117707482266486, 0.19440140173862305, 0.08109327370258856, 0.12555170387282946, 0.11882911786467269, 0.136405935132362, 0.15471020268934504, 0.08701393714396005, 0.1730186383055321, 0.18540188963591128, 0.15155528966035514, 0.11189410743253432], 7, 0.7864031085067626),
    (&[0.24155367565470307, 0.758446324345297], 2, 0.9324294052376245),
];

pub const STOCH_GAUSSIAN: &[(&[f64], &[f64], usize, f64, f64)] = &[
    (&[0.5], &[1e-12], 1, 1.0, -0.9999999999933333),
    (&[0.3], &[0.4], 1, 1.0, 0.9999999999999996),
    (&[0.8696806501457639, -0.09675473886877217, -0.6656795377252718, -0.374624843099717, 0.19674739086040316, -0.04086094344141755, -0.5671735603459389, -0.5332569560052667], &[0.9111596290662434, 0.7712622224286826, 0.11605757223452899, 0.7505699924227636, 0.1492932226703829, 0.6177239128458697, 0.6369807453094007, 0.4657748512940845], 2, 1.67338584090935, 0.3355137147531674),
    (&[-0.4127277227990005, -0.7377552462119843, -0.31408456659909345, 0.44975449058242134, -0.5842632679767985, -0.8893543848428715], &[0.5506828070090722, 0.7282003450618932, 0.26737085649302383, 0.9465974501070615, 0.8521089429921945, 0.9548430756309664], 2, 1.1463914222320024, 0.7637271089344843),
    (&[-0.4177597016045569, 0.0002464785461957497], &[0.2296128395750629, 0.20215244219674025], 1, 0.5695813716608509, 0.09312929532888392),
    (&[0.6128370058562633, -0.7073081288153842], &[0.09480096986178738, 0.8718916756481311], 1, 1.5964690951213882, 0.21577649447707914),
];

pub const FAMILIARITY_POINT: &[(&[f64], usize, f64)] = &[
    (&[1.0, 0.0, 1.0, 0.0], 2, 1.0),
    (&[1.0, 0.0, 0.0, 1.0], 2, 0.0),
    (&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0], 8, -0.75),
    (&[1.0, 0.0, -1.0, 0.0], 2, 0.0),
    (&[1.0, 2.0, 2.0, 4.0, 3.0, 6.0], 2, 0.9999999999999998),
    (&[-0.4064221217762113, -0.258190880052795, -0.24907684720732354, 0.24630239323429987, -0.39568422568732436, 0.18882590957291476], 3, 0.0),
    (&[1.2886171561527144, 1.282189368764335, -0.4989000535057594, -0.19480229226709952, 0.5635307969815947, -0.40216940916632676], 2, -0.2589896246650081),
    (&[-0.5251255386482244, -0.9464917873605595, -0.5840555472328262, -0.9465571680454379, -0.8360669691790782, -0.6741152667020991, -0.13512810871630251, 1.765405302991327, 1.6163499341349006, 0.35328607197127737, 0.40651433544644733, 0.6598650092302748, -0.053931786446284345, -0.30697384834094055, 1.4119730199305565, -1.3986363770684853, 1.1920225588458475, -0.9010653814956165, -1.6912126647736563, 0.6968322784724564], 4, -0.4476688165260543),
    (&[-0.8383433867017928, -2.5704916284707724, 0.39577178568493077, 0.38388116950851003], 1, 0.0),
    (&[-0.10218298052176666, 0.7920206686434038, -1.1156088145977152, 0.08773887302157715, 1.3157600104557354, 0.12628961302619487, -0.11064685442231861, -0.7284089270805458, -0.16799314259173212, 0.21922503501137755, -0.7793482128023351, -0.4541686431451968, -0.494372634215658, -0.04294139402523082, 0.5909606113176373, 0.15098069930253535, 0.8235376733538392, -0.20522092631184458, 0.5792781417768755, -0.09147006412087806, -0.8889751173905616, -1.1621584125599969, -1.6967954596197479, 1.7388874868243276, -1.5127665244006918, -1.288844694379529, -1.3255523777606109, 0.2911769893825501, 0.8102890200018186, 0.05757938210737478, 1.6353123508014094, 0.07467845102723963, 0.20285031045990382, 0.20349776191921748, -0.45793057316957525, -0.07989687285706257], 6, -0.503132332750434),
    (&[0.7865624302078057, -0.8014161344677627, -0.18079583334353055, 0.2185224302830062, 0.17302145003799668, -0.10960375341343831, -1.2202084263700317, 0.7092697269323499, -0.20806127952136944, 3.359229901308165, -1.603735671695043, 1.448540803575922, 1.123480537116128, 0.9753104029277943, -0.6028301718925735, -0.3535018582081384, -0.06979445591288089, -0.5621304383577628, -0.25545733601366194, -0.8014514882841338, -0.7860047474227535, 1.155457602259316, -2.4287861856349706, 0.44759305581691583, 0.4830632787332158, 2.3914631686265437, -1.0425561828245742, -0.9580318221797306, 1.4773440552691008, 0.38921224751180933], 3, -0.40345702680885953),
];

pub const FAMILIARITY_GAUSSIAN: &[(&[f64], &[f64], usize, f64)] = &[
    (&[-1.0682404446693228, 0.7647183308085306], &[0.38152612471360126, 1.450102875806181], 1, 0.4828379451914597),
    (&[-1.010604515528127, 0.6209786940664384, 2.0111695484445375, -0.7181953827429377, -0.40810524777384555, -2.084800796885199], &[0.7811326838808744, 0.1288567357525718, 0.25246376724248637, 1.1070887740624245, 1.4158830428586051, 0.9322547211942809], 2, -0.20114712062489093),
    (&[-0.8721981184770234, -0.2971473793973277, 3.5639665979911936, -1.300816847201952, 1.523170979855783, -0.8121349144780692, 0.21593814713808282, -0.5849871624990838, -0.8592231649439964, 2.6653875428380593, 0.3521990533576665, 1.396974146306964, 1.8069230920821093, 0.47043914677323734, -0.9029786960430286], &[0.5658230924433717, 0.7263374288233879, 0.8060604854775053, 1.1446191786384006, 1.0866115755196335, 1.3719936970595847, 0.23716589157678336, 1.47904497018418, 1.4568998364825525, 0.7237963551122301, 0.23792707660760717, 1.2279788185830531, 1.0520534597720763, 1.0118082329368272, 0.5063350321540105], 3, -0.40194278039414466),
    (&[1.987597824844185, -0.9475004747354259, 1.5765975786911208, 0.23539689661192773], &[0.3906682797711941, 0.140261328118122, 1.2530971505454973, 0.7370514523773066], 1, 0.07285733759916801),
];
